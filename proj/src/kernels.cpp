#include "lnmix/kernels.hpp"

#include <cmath>

#include "lnmix/descriptors.hpp"  // ipow
#include "lnmix/errors.hpp"

namespace lnmix {

std::string_view kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::Polynomial:
      return "poly";
    case KernelKind::Gaussian:
      return "gaussian";
    default:
      return "laplacian";
  }
}

KernelSpec KernelSpec::polynomial(int degree, double gamma, double c) {
  if (degree < 1) throw PreconditionError("polynomial kernel needs degree >= 1");
  if (!(gamma > 0)) throw PreconditionError("kernel gamma must be > 0");
  if (c < 0) throw PreconditionError("polynomial kernel needs c >= 0");
  return {KernelKind::Polynomial, degree, gamma, c};
}

KernelSpec KernelSpec::gaussian(double gamma) {
  if (!(gamma > 0)) throw PreconditionError("kernel gamma must be > 0");
  return {KernelKind::Gaussian, 0, gamma, 0};
}

KernelSpec KernelSpec::laplacian(double gamma) {
  if (!(gamma > 0)) throw PreconditionError("kernel gamma must be > 0");
  return {KernelKind::Laplacian, 0, gamma, 0};
}

std::string KernelSpec::name() const {
  if (kind == KernelKind::Polynomial) {
    return "poly" + std::to_string(degree);
  }
  return std::string(kernel_kind_name(kind));
}

namespace {

void check_dims(const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  if (x.size() != z.size()) {
    throw PreconditionError("kernel arguments differ in dimension: " +
                            std::to_string(x.size()) + " vs " +
                            std::to_string(z.size()));
  }
}

double transform_one(const KernelSpec& spec, double base) {
  switch (spec.kind) {
    case KernelKind::Polynomial:
      return ipow(spec.gamma * base + spec.c, spec.degree);
    case KernelKind::Gaussian:
    case KernelKind::Laplacian:
      return std::exp(-spec.gamma * base);
  }
  return 0;  // unreachable
}

double base_one(KernelKind kind, const Eigen::VectorXd& x,
                const Eigen::VectorXd& z) {
  switch (kind) {
    case KernelKind::Polynomial:
      return x.dot(z);
    case KernelKind::Gaussian:
      return (x - z).squaredNorm();
    default:
      return (x - z).lpNorm<1>();
  }
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z) {
  check_dims(x, z);
  return transform_one(spec, base_one(spec.kind, x, z));
}

Eigen::MatrixXd base_matrix(KernelKind kind, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B) {
  if (A.cols() != B.cols()) {
    throw PreconditionError("kernel inputs differ in dimension: " +
                            std::to_string(A.cols()) + " vs " +
                            std::to_string(B.cols()));
  }
  const auto na = A.rows();
  const auto nb = B.rows();
  Eigen::MatrixXd base(na, nb);
  for (Eigen::Index j = 0; j < nb; ++j) {
    for (Eigen::Index i = 0; i < na; ++i) {
      base(i, j) = base_one(kind, A.row(i).transpose(), B.row(j).transpose());
    }
  }
  return base;
}

Eigen::MatrixXd gram_from_base(const KernelSpec& spec,
                               const Eigen::MatrixXd& base) {
  Eigen::MatrixXd k(base.rows(), base.cols());
  for (Eigen::Index j = 0; j < base.cols(); ++j) {
    for (Eigen::Index i = 0; i < base.rows(); ++i) {
      k(i, j) = transform_one(spec, base(i, j));
    }
  }
  return k;
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  const auto n = X.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double v = kernel_eval(spec, X.row(i).transpose(), X.row(j).transpose());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec,
                           const Eigen::MatrixXd& X_train,
                           const Eigen::MatrixXd& X_new) {
  if (X_new.rows() == 0) return Eigen::MatrixXd(X_train.rows(), 0);
  return gram_from_base(spec, base_matrix(spec.kind, X_train, X_new));
}

}  // namespace lnmix
