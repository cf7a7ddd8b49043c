#pragma once

#include <map>
#include <string>
#include <vector>

#include "azumaya/poly.hpp"
#include "azumaya/worldvolume.hpp"

namespace az {

/// Polynomial differential p-form on R^n: strictly increasing index tuples
/// mapped to polynomial coefficient functions.
struct PolyForm {
    int n = 0;
    int degree = 0;
    std::map<std::vector<int>, MPoly> terms;  // 0-based increasing tuples

    void add_term(std::vector<int> idx, MPoly coeff);
    static PolyForm constant_form(int n, int degree,
                                  const std::vector<std::pair<std::vector<int>, double>>& data);
    /// The standard flat-space 3-form used by the calibration checker.
    static PolyForm g2_standard();
    /// dy^1 ^ dy^2 on R^2.
    static PolyForm area_form_r2();
};

struct ComponentVerdict {
    int component = 0;
    std::vector<int> tracks;
    bool pass = false;
    double residual = 0.0;
    double theta = 0.0;  // fitted phase, for the special Lagrangian check
};

struct AdaptedReport {
    bool pass = false;
    double residual = 0.0;
    std::vector<ComponentVerdict> components;
    std::string detail;
};

enum class SlagConvention { Im, Re };

/// Pullback of a p-form to each simple branch x -> (x, lambda(x)); p greater
/// than the base dimension gives identically zero, p = 1 the coefficient of
/// dx sampled on the grid.
std::vector<std::vector<double>> pullback_to_branches(const PolyForm& alpha,
                                                      const BranchDiagram& diag);

AdaptedReport check_relative_dim0(const BranchDiagram& diag);

AdaptedReport check_lagrangian(const BranchDiagram& diag, const PolyForm& omega,
                               int base_dim, int target_dim, double tol = 1e-8);

AdaptedReport check_slag(const BranchDiagram& diag,
                         SlagConvention convention = SlagConvention::Im,
                         double tol = 1e-8);

/// Restriction of alpha to the span of the given vectors (evaluated at a base
/// point); pass when |alpha(v_1, ..., v_p)| < tol for all basis tuples.
AdaptedReport check_calibration_vanishing_plane(
    const PolyForm& alpha, const std::vector<std::vector<double>>& plane,
    const std::vector<double>& at_point, double tol = 1e-10);

/// Diagram flavor: trivially passes when the form degree exceeds the base
/// dimension; base_dim must match expected_base_dim.
AdaptedReport check_calibration_vanishing(const BranchDiagram& diag,
                                          const PolyForm& alpha,
                                          int expected_base_dim,
                                          double tol = 1e-8);

/// Cauchy-Riemann residual of the eigenvalue branches of a planar-base map
/// with target R^{2m}, by central differences with step h on a grid over
/// [u0,u1] x [v0,v1].
AdaptedReport check_j_holomorphic(const PlanarMatrixMap& map, double u0,
                                  double u1, double v0, double v1,
                                  int grid = 16, double h = 1e-3,
                                  double tol = 1e-5);

}  // namespace az
