#pragma once

#include <array>
#include <string>
#include <string_view>

#include "lnmix/elements.hpp"

namespace lnmix {

struct ElementRecord {
  std::array<double, kPropertyCount> values{};  // indexed by PropertyId

  double get(PropertyId p) const { return values[static_cast<int>(p)]; }
  void set(PropertyId p, double v) { values[static_cast<int>(p)] = v; }
};

// Complete 15-element x 2-phase property table. Loading validates the data
// contract; a loaded table can be used without further checks.
class ElementalTable {
 public:
  double property(Element e, Phase ph, PropertyId p) const;
  // Name-based lookup; throws LookupError for unknown names.
  double property(Element e, Phase ph, std::string_view name) const;

  const ElementRecord& record(Element e, Phase ph) const;
  void set_record(Element e, Phase ph, const ElementRecord& rec);

 private:
  std::array<std::array<ElementRecord, kElementCount>, kPhaseCount> records_{};
};

// Loads and validates the bundled CSV
// (header: element,phase,Z,m,R,IP2,IP3,chi,Y,Zeff,rho,V).
// Throws ParseError (unreadable/bad number, with row number),
// SchemaError (missing/duplicate rows, non-monotone Z, non-positive R/V/Y/m).
ElementalTable load_table(const std::string& csv_path);

// Writes the same CSV schema with exact round-trip formatting.
void write_table(const ElementalTable& table, const std::string& csv_path);

}  // namespace lnmix
