#include "lnmix/elemental_table.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "lnmix/csv.hpp"
#include "lnmix/errors.hpp"

namespace lnmix {

namespace {

const char* kHeader = "element,phase,Z,m,R,IP2,IP3,chi,Y,Zeff,rho,V";

std::string row_context(std::size_t row) {
  return "lanthanide table row " + std::to_string(row);
}

}  // namespace

double ElementalTable::property(Element e, Phase ph, PropertyId p) const {
  return record(e, ph).get(p);
}

double ElementalTable::property(Element e, Phase ph,
                                std::string_view name) const {
  auto p = property_from_name(name);
  if (!p) {
    std::string valid;
    for (auto q : all_properties()) {
      if (!valid.empty()) valid += ", ";
      valid += property_name(q);
    }
    throw LookupError("unknown property: '" + std::string(name) +
                      "' (valid: " + valid + ")");
  }
  return property(e, ph, *p);
}

const ElementRecord& ElementalTable::record(Element e, Phase ph) const {
  return records_[static_cast<int>(ph)][static_cast<int>(e)];
}

void ElementalTable::set_record(Element e, Phase ph,
                                const ElementRecord& rec) {
  records_[static_cast<int>(ph)][static_cast<int>(e)] = rec;
}

ElementalTable load_table(const std::string& csv_path) {
  auto lines = csv::read_lines(csv_path);
  if (lines.empty()) throw ParseError(csv_path + ": empty file");
  if (lines[0] != kHeader) {
    throw SchemaError(csv_path + ": bad header, expected '" +
                      std::string(kHeader) + "'");
  }

  ElementalTable table;
  std::set<std::pair<int, int>> seen;  // (phase, element)

  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    auto ctx = row_context(row);
    auto fields = csv::split(lines[row]);
    if (fields.size() != 2 + kPropertyCount) {
      throw ParseError(ctx + ": expected " +
                       std::to_string(2 + kPropertyCount) + " fields, got " +
                       std::to_string(fields.size()));
    }
    auto elem = element_from_name(fields[0]);
    if (!elem) throw SchemaError(ctx + ": unknown element: '" + fields[0] + "'");
    auto phase = phase_from_name(fields[1]);
    if (!phase) throw SchemaError(ctx + ": unknown phase: '" + fields[1] + "'");

    auto key = std::make_pair(static_cast<int>(*phase), static_cast<int>(*elem));
    if (!seen.insert(key).second) {
      throw SchemaError(ctx + ": duplicate row for " + fields[0] + " (" +
                        fields[1] + ")");
    }

    ElementRecord rec;
    for (int p = 0; p < kPropertyCount; ++p) {
      rec.values[p] = csv::parse_double(
          fields[2 + p], ctx + ", column " +
                             std::string(property_name(static_cast<PropertyId>(p))));
    }
    table.set_record(*elem, *phase, rec);
  }

  // Completeness: every (element, phase) combination present.
  for (auto ph : {Phase::Monazite, Phase::Xenotime}) {
    for (auto e : all_elements()) {
      if (!seen.count({static_cast<int>(ph), static_cast<int>(e)})) {
        throw SchemaError(csv_path + ": missing element: " +
                          std::string(element_name(e)) + " (" +
                          std::string(phase_name(ph)) + ")");
      }
    }
  }

  // Value contract: Z strictly increasing and phase-consistent; positive
  // radius, volume, modulus and mass.
  for (auto ph : {Phase::Monazite, Phase::Xenotime}) {
    double prev_z = -1;
    for (auto e : all_elements()) {
      const auto& rec = table.record(e, ph);
      std::string who = std::string(element_name(e)) + " (" +
                        std::string(phase_name(ph)) + ")";
      if (rec.get(PropertyId::Z) <= prev_z) {
        throw SchemaError(csv_path + ": Z not strictly increasing at " + who);
      }
      prev_z = rec.get(PropertyId::Z);
      if (rec.get(PropertyId::Z) !=
          table.record(e, Phase::Monazite).get(PropertyId::Z)) {
        throw SchemaError(csv_path + ": Z differs between phases for " +
                          std::string(element_name(e)));
      }
      if (!(rec.get(PropertyId::R) > 0)) {
        throw SchemaError(csv_path + ": R must be > 0 at " + who);
      }
      if (!(rec.get(PropertyId::V) > 0)) {
        throw SchemaError(csv_path + ": V must be > 0 at " + who);
      }
      if (!(rec.get(PropertyId::Y) > 0)) {
        throw SchemaError(csv_path + ": Y must be > 0 at " + who);
      }
      if (!(rec.get(PropertyId::m) > 0)) {
        throw SchemaError(csv_path + ": m must be > 0 at " + who);
      }
    }
  }
  return table;
}

void write_table(const ElementalTable& table, const std::string& csv_path) {
  std::ostringstream out;
  out << kHeader << "\n";
  for (auto ph : {Phase::Monazite, Phase::Xenotime}) {
    for (auto e : all_elements()) {
      out << element_name(e) << ',' << phase_name(ph);
      const auto& rec = table.record(e, ph);
      for (int p = 0; p < kPropertyCount; ++p) {
        out << ',' << csv::format_double(rec.values[p]);
      }
      out << "\n";
    }
  }
  csv::write_text(csv_path, out.str());
}

}  // namespace lnmix
