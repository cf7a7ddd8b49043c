#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "azumaya/adapted.hpp"
#include "azumaya/fixtures.hpp"
#include "azumaya/jet.hpp"
#include "azumaya/point_map.hpp"
#include "azumaya/worldvolume.hpp"

namespace az {

/// Parsed map-specification document: exactly one of a point map, a curve
/// map, or a family, plus options.
struct MapSpecDoc {
    std::string version = "1";
    std::optional<AzumayaPointMap> point_map;
    std::optional<MatrixCurveMap> curve_map;
    std::optional<FamilySpec> family;
    double tol = kDefaultTol;
    int grid_size = 512;
    SlagConvention slag_convention = SlagConvention::Im;
};

MapSpecDoc parse_spec(const std::string& bytes);
std::string serialize_spec(const MapSpecDoc& doc);

/// FnSpec from JSON text (object form) or from a small expression grammar:
/// polynomials in y1..yn with + - * ^ and parentheses, an optional top-level
/// quotient p / q, or sin/cos/exp of a polynomial argument.
FnSpec parse_fnspec(const std::string& text, int arity);

PolyForm parse_polyform(const std::string& text);

std::string branch_csv(const BranchDiagram& d);
std::string branch_svg(const BranchDiagram& d);

std::string diagram_json(const BranchDiagram& d);
std::string classification_json(const Classification& c);
std::string admissibility_json(const AdmissibilityReport& r);
std::string support_json(const SupportScheme& s);
std::string module_json(const ModuleStructure& m);
std::string matrix_json(const Mat& m);
std::string connection_json(const BranchConnection& c);
std::string adapted_json(const AdaptedReport& r);

std::string format_double(double v);  // 17 significant digits, deterministic

}  // namespace az
