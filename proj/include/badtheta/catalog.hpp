#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "badtheta/numerics.hpp"

namespace badtheta {

/// A named target pair Θ shipped with the tool.
struct CatalogEntry {
  std::string name;
  std::string description;
  std::string theta1;
  std::string theta2;
  std::string declared_error;

  ThetaForm form() const;
};

const std::vector<CatalogEntry>& catalog();

/// Throws ConfigError for an unknown name.
const CatalogEntry& catalog_entry(std::string_view name);

}  // namespace badtheta
