#pragma once

#include <Eigen/Dense>
#include <string>

namespace lnmix {

enum class KernelKind { Polynomial, Gaussian, Laplacian };

std::string_view kernel_kind_name(KernelKind k);

// k(x,z) = (gamma <x,z> + c)^p        polynomial (p >= 1, gamma > 0, c >= 0)
// k(x,z) = exp(-gamma ||x-z||_2^2)    gaussian   (gamma > 0)
// k(x,z) = exp(-gamma ||x-z||_1)      laplacian  (gamma > 0)
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  int degree = 0;    // polynomial only
  double gamma = 1;
  double c = 0;      // polynomial only

  static KernelSpec polynomial(int degree, double gamma, double c);
  static KernelSpec gaussian(double gamma);
  static KernelSpec laplacian(double gamma);

  std::string name() const;  // e.g. "poly3", "gaussian"
};

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z);

// N x N symmetric kernel matrix; upper triangle computed, mirrored exactly.
// The Gaussian/Laplacian diagonal is exactly 1.
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& X);

// K'(i, j) = k(X_train row i, X_new row j):  N_train x N_new.
Eigen::MatrixXd cross_gram(const KernelSpec& spec,
                           const Eigen::MatrixXd& X_train,
                           const Eigen::MatrixXd& X_new);

// Grid-search fast path: the pairwise statistic a kernel family transforms
// (dot products for polynomial, squared L2 / L1 distances otherwise),
// computed once and reused across hyperparameter settings.
Eigen::MatrixXd base_matrix(KernelKind kind, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B);
Eigen::MatrixXd gram_from_base(const KernelSpec& spec,
                               const Eigen::MatrixXd& base);

}  // namespace lnmix
