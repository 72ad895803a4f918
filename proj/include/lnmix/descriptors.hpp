#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lnmix/elemental_table.hpp"
#include "lnmix/elements.hpp"

namespace lnmix {

// One mixed crystal (Li_m Lj_1-m) PO4 in a given host phase.
// Canonical orientation: li has the lower atomic number and m is its
// fraction, so (a, b, m) and (b, a, 1-m) name the same physical system and
// map to the same MixPair.
struct MixPair {
  Element li;
  Element lj;
  double m;
  Phase phase;

  // Canonicalizes and validates (a != b, 0 < m_a < 1).
  static MixPair make(Element a, Element b, double m_a, Phase ph);

  std::string name() const;  // e.g. "La-Ce"
};

enum class DescriptorFamily { KrrOriginal, PriorKnowledge };

// One symbolic descriptor over a pair: a base quantity, an integer power,
// optionally inverted. The label is the quantity's identity everywhere
// (feature products, formulas, CSV headers).
struct BaseDescriptor {
  enum class Kind {
    KrrWeightedMean,      // x1: m*e_i + (1-m)*e_j
    KrrQuadWeightedMean,  // x2: (m^2 e_i + (1-m)^2 e_j) / (m^2 + (1-m)^2)
    KrrAbsDiff,           // x3: |e_i - e_j|
    Mean,                 // (e_i + e_j) / 2
    Diff,                 // |e_i - e_j| / 2
    Mix,                  // m
    OneMinusMix           // 1 - m
  };

  Kind kind{};
  PropertyId prop{};  // ignored for Mix / OneMinusMix
  int power = 1;
  bool inverse = false;

  std::string label() const;
};

// Elementary statistics used by the KRR-original family.
double weighted_mean(double ei, double ej, double m);
double quad_weighted_mean(double ei, double ej, double m);
double abs_difference(double ei, double ej);

// Deterministic power by repeated multiplication; the single code path for
// integer powers everywhere (descriptor evaluation and feature products).
double ipow(double x, int p);

// Evaluates one descriptor on a pair. An inverse of an exactly-zero base
// value yields +/-inf; callers drop such entries.
double evaluate_descriptor(const BaseDescriptor& d, const ElementalTable& t,
                           const MixPair& pair);

// Which descriptors a scheme emits, in frozen deterministic order:
//   KrrOriginal:     per property: x1, x2, x3.
//   PriorKnowledge:  (a) mean, diff per property;
//                    (b) their reciprocals (include_inverses);
//                    (c) mix block: m^p, (1-m)^p for p in mix_powers, then
//                        inv(m^p), inv((1-m)^p) for p in mix_inverse_powers;
//                    (d) power blocks, V first then R then remaining
//                        properties in property order: diff^p, mean^p for
//                        each listed p, then their reciprocals.
// The bundled default (prior_default) totals exactly 58 entries.
struct DescriptorScheme {
  DescriptorFamily family = DescriptorFamily::PriorKnowledge;
  std::vector<PropertyId> properties;
  bool include_inverses = true;
  std::vector<int> mix_powers{1, 2};
  std::vector<int> mix_inverse_powers{1};
  std::vector<std::pair<PropertyId, std::vector<int>>> power_blocks;

  static DescriptorScheme krr_default();    // 10 properties -> 30 descriptors
  static DescriptorScheme prior_default();  // 9 properties -> 58 descriptors

  std::vector<BaseDescriptor> base_descriptors() const;
  std::vector<std::string> labels() const;
};

// Values of one scheme over one pair. `dropped` lists labels removed for
// this pair because the reciprocal of an exactly-zero quantity is undefined.
struct DescriptorVector {
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<std::string> dropped;
};

DescriptorVector build_descriptors(const ElementalTable& t,
                                   const DescriptorScheme& scheme,
                                   const MixPair& pair);

}  // namespace lnmix
