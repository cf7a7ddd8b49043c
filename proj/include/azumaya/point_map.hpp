#pragma once

#include <optional>
#include <string>
#include <vector>

#include "azumaya/jet.hpp"
#include "azumaya/linalg.hpp"
#include "azumaya/poly.hpp"

namespace az {

/// Differentiability class: a nonnegative integer or infinity.
struct Smoothness {
    int value = -1;  // -1 encodes infinity

    static Smoothness infinite() { return Smoothness{-1}; }
    static Smoothness finite(int k) { return Smoothness{k}; }
    bool is_infinite() const { return value < 0; }
    int capped(int bound) const { return is_infinite() ? bound : std::min(value, bound); }
    std::string str() const { return is_infinite() ? "inf" : std::to_string(value); }
};

/// A map from the rank-r matrix point to R^n, given by the images
/// ms[i] = phi(y^i) of the coordinate functions, with differentiability
/// class k and working tolerance.
struct AzumayaPointMap {
    int r = 0;
    int n = 0;
    std::vector<Mat> ms;
    Smoothness k = Smoothness::infinite();
    double tol = kDefaultTol;
};

struct AdmissibilityReport {
    bool admissible = false;
    double commutation_defect = 0.0;
    double max_spectral_imag = 0.0;
    double tol = 0.0;
    std::string reason;  // empty when admissible
};

struct SupportPoint {
    RVec lambda;                        // point in R^n
    int length = 0;                     // C-dimension of the block
    std::vector<int> nilpotency_orders; // per axis, smallest p with (m-l)^p = 0
    std::vector<int> filtration;        // ascending dims of the radical-power chain
};

struct SupportScheme {
    std::vector<SupportPoint> points;
    BlockDecomposition blocks;  // shared basis data, same ordering as points
    int rank() const {
        int s = 0;
        for (const auto& p : points) s += p.length;
        return s;
    }
};

struct ModuleFiber {
    RVec lambda;
    int dim = 0;
    std::vector<int> filtration;
    std::vector<Mat> nilpotent_generators;  // per axis, in the block basis
    std::vector<int> summand_sizes;         // sizes of indecomposable pieces
};

struct ModuleStructure {
    std::vector<ModuleFiber> fibers;
};

AdmissibilityReport validate(const AzumayaPointMap& map);
void require_admissible(const AzumayaPointMap& map);

SupportScheme support(const AzumayaPointMap& map);

/// phi(f): per block sum over |alpha| <= D of d^alpha f(lambda)/alpha! times
/// the nilpotent monomial, D = min{k, n (block_size - 1)}, assembled back
/// through the basis change.
Mat evaluate(const AzumayaPointMap& map, const FnSpec& f);

/// Monic real polynomial in y^axis annihilating ms[axis], as the product of
/// (y - lambda)^p over the distinct axis values of the support.
Poly minimal_annihilator(const AzumayaPointMap& map, int axis);

ModuleStructure pushforward_module(const AzumayaPointMap& map);

/// Block value of the evaluation formula for one support point, exposed for
/// reuse by the worldvolume fiber machinery.
Mat evaluate_block(const Jet& jet, const std::vector<Mat>& nilpotents,
                   int block_size);

}  // namespace az
