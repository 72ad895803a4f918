#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace lnmix {

// The fifteen lanthanides, in atomic-number order (La = 57 ... Lu = 71).
enum class Element : int {
  La, Ce, Pr, Nd, Pm, Sm, Eu, Gd, Tb, Dy, Ho, Er, Tm, Yb, Lu
};

inline constexpr int kElementCount = 15;

constexpr std::array<Element, kElementCount> all_elements() {
  return {Element::La, Element::Ce, Element::Pr, Element::Nd, Element::Pm,
          Element::Sm, Element::Eu, Element::Gd, Element::Tb, Element::Dy,
          Element::Ho, Element::Er, Element::Tm, Element::Yb, Element::Lu};
}

constexpr int atomic_number(Element e) { return 57 + static_cast<int>(e); }

std::string_view element_name(Element e);
std::optional<Element> element_from_name(std::string_view name);

// The two phosphate host structures. Monazite coordinates the cation
// ninefold, xenotime eightfold; the bundled table stores the matching
// ionic radius (and the phase's own Y and V) per row.
enum class Phase : int { Monazite, Xenotime };

inline constexpr int kPhaseCount = 2;

std::string_view phase_name(Phase p);  // "monazite" / "xenotime"
std::optional<Phase> phase_from_name(std::string_view name);

// Tabulated per-element quantities, in bundled-CSV column order.
//   Z     atomic number
//   m     atomic mass [u]
//   R     ionic radius at the phase's coordination [A]
//   IP2   second ionization potential [eV]
//   IP3   third ionization potential [eV]
//   chi   electronegativity
//   Y     Young's modulus of the phosphate [GPa]      (phase-dependent)
//   Zeff  effective nuclear charge
//   rho   elemental density [g/cm^3]
//   V     phosphate cell volume per formula unit [A^3] (phase-dependent)
enum class PropertyId : int { Z, m, R, IP2, IP3, chi, Y, Zeff, rho, V };

inline constexpr int kPropertyCount = 10;

constexpr std::array<PropertyId, kPropertyCount> all_properties() {
  return {PropertyId::Z,   PropertyId::m,    PropertyId::R,   PropertyId::IP2,
          PropertyId::IP3, PropertyId::chi,  PropertyId::Y,   PropertyId::Zeff,
          PropertyId::rho, PropertyId::V};
}

std::string_view property_name(PropertyId p);
std::optional<PropertyId> property_from_name(std::string_view name);

// R, Y and V differ between the two phases; everything else is shared.
constexpr bool property_phase_dependent(PropertyId p) {
  return p == PropertyId::R || p == PropertyId::Y || p == PropertyId::V;
}

}  // namespace lnmix
