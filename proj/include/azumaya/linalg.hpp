#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "azumaya/errors.hpp"

namespace az {

using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

constexpr double kDefaultTol = 1e-8;

/// Jordan-type data of a single matrix: clustered eigenvalues with
/// multiplicities, nilpotent indices and a basis adapted to the
/// generalized eigenspaces.
struct SpectralData {
    std::vector<std::complex<double>> eigenvalues;  // one per cluster
    std::vector<int> multiplicities;
    std::vector<int> nilpotent_indices;  // smallest p with (m - l)^p = 0 on block
    Mat basis_change;                    // columns grouped per cluster
    std::vector<int> block_offsets;      // start column of each cluster
};

/// Common refinement of the generalized eigenspaces of a commuting tuple.
/// Block l carries the real eigenvalue tuple block_points[l]; in the
/// basis_change basis every input matrix is block diagonal with blocks
/// lambda^i Id + nilpotent. Blocks are ordered lexicographically in lambda.
struct BlockDecomposition {
    std::vector<int> block_sizes;
    std::vector<RVec> block_points;
    Mat basis_change;
    std::vector<int> block_offsets;

    int rank() const {
        int r = 0;
        for (int s : block_sizes) r += s;
        return r;
    }
    Mat block_of(const Mat& m, int l) const {
        // restriction of m to block l in the adapted basis, via the
        // pseudo-inverse rows of basis_change
        Mat p_inv = basis_change.partialPivLu().solve(
            Mat::Identity(basis_change.rows(), basis_change.cols()));
        return p_inv.middleRows(block_offsets[l], block_sizes[l]) * m *
               basis_change.middleCols(block_offsets[l], block_sizes[l]);
    }
};

/// Max over pairs of || [m_i, m_j] ||_F / (||m_i||_F ||m_j||_F); 0 for a
/// single matrix.
double commutation_defect(const std::vector<Mat>& ms);

/// Scale used by every tolerance comparison: max(1, ||m||_F).
double norm_scale(const Mat& m);

SpectralData spectral_decompose(const Mat& m, double tol = kDefaultTol);

BlockDecomposition joint_block_decompose(const std::vector<Mat>& ms,
                                         double tol = kDefaultTol);

/// Smallest p <= cap with ||n^p|| below the zero threshold theta; returns
/// cap + 1 if no power collapses (caller decides how to treat that).
int nilpotent_index(const Mat& n, int cap, double theta);

/// Numerical rank with absolute threshold on singular values.
int numerical_rank(const Mat& m, double threshold);

}  // namespace az
