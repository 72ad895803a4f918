#include "lnmix/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lnmix/errors.hpp"

namespace lnmix {

MixPair MixPair::make(Element a, Element b, double m_a, Phase ph) {
  if (a == b) {
    throw PreconditionError("mix pair needs two distinct elements, got " +
                            std::string(element_name(a)) + " twice");
  }
  if (!(m_a > 0.0 && m_a < 1.0)) {
    throw PreconditionError("mixing ratio must lie in (0, 1), got " +
                            std::to_string(m_a));
  }
  MixPair p;
  p.phase = ph;
  if (atomic_number(a) < atomic_number(b)) {
    p.li = a;
    p.lj = b;
    p.m = m_a;
  } else {
    p.li = b;
    p.lj = a;
    p.m = 1.0 - m_a;
  }
  return p;
}

std::string MixPair::name() const {
  return std::string(element_name(li)) + "-" + std::string(element_name(lj));
}

double weighted_mean(double ei, double ej, double m) {
  return m * ei + (1.0 - m) * ej;
}

double quad_weighted_mean(double ei, double ej, double m) {
  double wi = m * m;
  double wj = (1.0 - m) * (1.0 - m);
  return (wi * ei + wj * ej) / (wi + wj);
}

double abs_difference(double ei, double ej) { return std::abs(ei - ej); }

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

std::string BaseDescriptor::label() const {
  std::string core;
  switch (kind) {
    case Kind::KrrWeightedMean:
      return "x1(" + std::string(property_name(prop)) + ")";
    case Kind::KrrQuadWeightedMean:
      return "x2(" + std::string(property_name(prop)) + ")";
    case Kind::KrrAbsDiff:
      return "x3(" + std::string(property_name(prop)) + ")";
    case Kind::Mean:
      core = "mean(" + std::string(property_name(prop)) + ")";
      break;
    case Kind::Diff:
      core = "diff(" + std::string(property_name(prop)) + ")";
      break;
    case Kind::Mix:
      core = "m";
      break;
    case Kind::OneMinusMix:
      core = "(1-m)";
      break;
  }
  if (power != 1) core += "^" + std::to_string(power);
  if (inverse) core = "inv(" + core + ")";
  return core;
}

double evaluate_descriptor(const BaseDescriptor& d, const ElementalTable& t,
                           const MixPair& pair) {
  double base = 0.0;
  switch (d.kind) {
    case BaseDescriptor::Kind::KrrWeightedMean:
      base = weighted_mean(t.property(pair.li, pair.phase, d.prop),
                           t.property(pair.lj, pair.phase, d.prop), pair.m);
      break;
    case BaseDescriptor::Kind::KrrQuadWeightedMean:
      base = quad_weighted_mean(t.property(pair.li, pair.phase, d.prop),
                                t.property(pair.lj, pair.phase, d.prop),
                                pair.m);
      break;
    case BaseDescriptor::Kind::KrrAbsDiff:
      base = abs_difference(t.property(pair.li, pair.phase, d.prop),
                            t.property(pair.lj, pair.phase, d.prop));
      break;
    case BaseDescriptor::Kind::Mean:
      base = (t.property(pair.li, pair.phase, d.prop) +
              t.property(pair.lj, pair.phase, d.prop)) /
             2.0;
      break;
    case BaseDescriptor::Kind::Diff:
      base = std::abs(t.property(pair.li, pair.phase, d.prop) -
                      t.property(pair.lj, pair.phase, d.prop)) /
             2.0;
      break;
    case BaseDescriptor::Kind::Mix:
      base = pair.m;
      break;
    case BaseDescriptor::Kind::OneMinusMix:
      base = 1.0 - pair.m;
      break;
  }
  double v = ipow(base, d.power);
  return d.inverse ? 1.0 / v : v;
}

DescriptorScheme DescriptorScheme::krr_default() {
  DescriptorScheme s;
  s.family = DescriptorFamily::KrrOriginal;
  constexpr auto props = all_properties();
  s.properties.assign(props.begin(), props.end());
  return s;
}

DescriptorScheme DescriptorScheme::prior_default() {
  DescriptorScheme s;
  s.family = DescriptorFamily::PriorKnowledge;
  // All tabulated quantities except elemental density.
  s.properties = {PropertyId::Z,   PropertyId::m,   PropertyId::R,
                  PropertyId::IP2, PropertyId::IP3, PropertyId::chi,
                  PropertyId::Y,   PropertyId::Zeff, PropertyId::V};
  s.include_inverses = true;
  s.mix_powers = {1, 2};
  s.mix_inverse_powers = {1};
  s.power_blocks = {{PropertyId::V, {2, 3}}, {PropertyId::R, {2, 3}}};
  return s;
}

std::vector<BaseDescriptor> DescriptorScheme::base_descriptors() const {
  if (properties.empty()) {
    throw PreconditionError("descriptor scheme needs at least one property");
  }
  {
    std::set<PropertyId> uniq(properties.begin(), properties.end());
    if (uniq.size() != properties.size()) {
      throw PreconditionError("descriptor scheme lists a property twice");
    }
  }

  std::vector<BaseDescriptor> out;
  if (family == DescriptorFamily::KrrOriginal) {
    for (auto p : properties) {
      out.push_back({BaseDescriptor::Kind::KrrWeightedMean, p, 1, false});
      out.push_back({BaseDescriptor::Kind::KrrQuadWeightedMean, p, 1, false});
      out.push_back({BaseDescriptor::Kind::KrrAbsDiff, p, 1, false});
    }
    return out;
  }

  // (a) means and differences
  for (auto p : properties) {
    out.push_back({BaseDescriptor::Kind::Mean, p, 1, false});
    out.push_back({BaseDescriptor::Kind::Diff, p, 1, false});
  }
  // (b) their reciprocals
  if (include_inverses) {
    for (auto p : properties) {
      out.push_back({BaseDescriptor::Kind::Mean, p, 1, true});
      out.push_back({BaseDescriptor::Kind::Diff, p, 1, true});
    }
  }
  // (c) mix block
  for (int p : mix_powers) {
    out.push_back({BaseDescriptor::Kind::Mix, PropertyId::Z, p, false});
    out.push_back({BaseDescriptor::Kind::OneMinusMix, PropertyId::Z, p, false});
  }
  for (int p : mix_inverse_powers) {
    out.push_back({BaseDescriptor::Kind::Mix, PropertyId::Z, p, true});
    out.push_back({BaseDescriptor::Kind::OneMinusMix, PropertyId::Z, p, true});
  }
  // (d) power blocks, canonical order: V, R, then remaining property order.
  std::vector<std::pair<PropertyId, std::vector<int>>> blocks;
  auto take = [&](PropertyId want) {
    for (const auto& b : power_blocks) {
      if (b.first == want) blocks.push_back(b);
    }
  };
  take(PropertyId::V);
  take(PropertyId::R);
  for (const auto& b : power_blocks) {
    if (b.first != PropertyId::V && b.first != PropertyId::R) blocks.push_back(b);
  }
  for (const auto& [prop, powers] : blocks) {
    if (std::find(properties.begin(), properties.end(), prop) ==
        properties.end()) {
      continue;  // power block for a property outside the subset is inert
    }
    for (int p : powers) {
      out.push_back({BaseDescriptor::Kind::Diff, prop, p, false});
    }
    for (int p : powers) {
      out.push_back({BaseDescriptor::Kind::Mean, prop, p, false});
    }
    if (include_inverses) {
      for (int p : powers) {
        out.push_back({BaseDescriptor::Kind::Diff, prop, p, true});
      }
      for (int p : powers) {
        out.push_back({BaseDescriptor::Kind::Mean, prop, p, true});
      }
    }
  }

  // Labels must be unique; the construction above cannot repeat one unless
  // the configuration does (e.g. power 1 listed both in (a) and a block).
  std::set<std::string> seen;
  for (const auto& d : out) {
    if (!seen.insert(d.label()).second) {
      throw PreconditionError("descriptor scheme emits duplicate label: " +
                              d.label());
    }
  }
  return out;
}

std::vector<std::string> DescriptorScheme::labels() const {
  std::vector<std::string> out;
  for (const auto& d : base_descriptors()) out.push_back(d.label());
  return out;
}

DescriptorVector build_descriptors(const ElementalTable& t,
                                   const DescriptorScheme& scheme,
                                   const MixPair& pair) {
  DescriptorVector vec;
  for (const auto& d : scheme.base_descriptors()) {
    double v = evaluate_descriptor(d, t, pair);
    if (!std::isfinite(v)) {
      // Reciprocal of an exactly-zero quantity: drop the label, keep going.
      vec.dropped.push_back(d.label());
      continue;
    }
    vec.labels.push_back(d.label());
    vec.values.push_back(v);
  }
  return vec;
}

}  // namespace lnmix
