#pragma once

#include <optional>
#include <string>
#include <vector>

#include "azumaya/point_map.hpp"
#include "azumaya/worldvolume.hpp"

namespace az {

/// Built-in fixtures shipped in the binary, addressable by name from the CLI
/// and the test suites.
std::optional<AzumayaPointMap> builtin_point_map(const std::string& name);
std::optional<MatrixCurveMap> builtin_curve_map(const std::string& name);
std::optional<FamilySpec> builtin_family(const std::string& name);

std::vector<std::string> builtin_names();

}  // namespace az
