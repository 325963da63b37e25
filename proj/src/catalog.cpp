#include "badtheta/catalog.hpp"

#include "badtheta/errors.hpp"

namespace badtheta {

ThetaForm CatalogEntry::form() const {
  return ThetaForm(parse_rational(theta1), parse_rational(theta2), parse_rational(declared_error));
}

const std::vector<CatalogEntry>& catalog() {
  // Liouville pair: exponents (k+1)!/2 = 1, 3, 12, 60, 360, ...; truncated
  // after 10^-60, so the tail is below 10^-358.
  static const std::vector<CatalogEntry> entries = {
      {"sqrt2-sqrt3", "(sqrt(2) - 1, sqrt(3) - 1), 51 digits",
       "414213562373095048801688724209698078569671875376948/1000000000000000000000000000000000000000000000000000",
       "732050807568877293527446341505872366942805253810380/1000000000000000000000000000000000000000000000000000",
       "1/1000000000000000000000000000000000000000000000000000"},
      {"golden", "(phi - 1, sqrt(phi) - 1), 60 digits",
       "0.618033988749894848204586834365638117720309179805762862135448",
       "0.272019649514068964252422461737491491715608041840096248616640",
       "0.000000000000000000000000000000000000000000000000000000000001"},
      {"liouville", "sum 10^-e_k and sum c_k 10^-e_k, e_k = (k+1)!/2, c = 2,7,1,8; not in BAD(2/3,1/3)",
       "0.101000000001000000000000000000000000000000000000000000000001",
       "0.207000000001000000000000000000000000000000000000000000000008",
       std::string("1/1") + std::string(358, '0')},
  };
  return entries;
}

const CatalogEntry& catalog_entry(std::string_view name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return e;
  }
  std::string known;
  for (const auto& e : catalog()) known += (known.empty() ? "" : ", ") + e.name;
  throw ConfigError("unknown catalog entry '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace badtheta
