#pragma once

#include <json.hpp>

#include "usde/catalog.hpp"

namespace usde {

// Builds a problem from a JSON document: either {"model": name, "params": {...}}
// for a catalog model, or an explicit problem with "family" set to one of
// const_vol, general, driftless_1d, path. Schema: docs/problem_schema.md.
// Throws ConfigError on malformed documents and LookupError on unknown models.
CatalogEntry problem_from_json(const nlohmann::json& doc);

// Reads the catalog "params" object; missing keys keep their defaults.
CatalogParams catalog_params_from_json(const nlohmann::json& params);

}  // namespace usde
