#include "lnmix/elements.hpp"

namespace lnmix {

namespace {

constexpr std::array<std::string_view, kElementCount> kElementNames = {
    "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd",
    "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu"};

constexpr std::array<std::string_view, kPropertyCount> kPropertyNames = {
    "Z", "m", "R", "IP2", "IP3", "chi", "Y", "Zeff", "rho", "V"};

}  // namespace

std::string_view element_name(Element e) {
  return kElementNames[static_cast<int>(e)];
}

std::optional<Element> element_from_name(std::string_view name) {
  for (int i = 0; i < kElementCount; ++i) {
    if (kElementNames[i] == name) return static_cast<Element>(i);
  }
  return std::nullopt;
}

std::string_view phase_name(Phase p) {
  return p == Phase::Monazite ? "monazite" : "xenotime";
}

std::optional<Phase> phase_from_name(std::string_view name) {
  if (name == "monazite") return Phase::Monazite;
  if (name == "xenotime") return Phase::Xenotime;
  return std::nullopt;
}

std::string_view property_name(PropertyId p) {
  return kPropertyNames[static_cast<int>(p)];
}

std::optional<PropertyId> property_from_name(std::string_view name) {
  for (int i = 0; i < kPropertyCount; ++i) {
    if (kPropertyNames[i] == name) return static_cast<PropertyId>(i);
  }
  return std::nullopt;
}

}  // namespace lnmix
