#include "azumaya/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace az {

double norm_scale(const Mat& m) { return std::max(1.0, m.norm()); }

double commutation_defect(const std::vector<Mat>& ms) {
    if (ms.empty()) return 0.0;
    const auto rows = ms[0].rows();
    for (const auto& m : ms) {
        if (m.rows() != m.cols()) throw DimensionMismatch("matrix not square");
        if (m.rows() != rows) throw DimensionMismatch("matrix sizes differ");
    }
    double defect = 0.0;
    for (size_t i = 0; i < ms.size(); ++i) {
        for (size_t j = i + 1; j < ms.size(); ++j) {
            const double denom = std::max(ms[i].norm() * ms[j].norm(), 1e-300);
            const Mat comm = ms[i] * ms[j] - ms[j] * ms[i];
            defect = std::max(defect, comm.norm() / denom);
        }
    }
    return defect;
}

int numerical_rank(const Mat& m, double threshold) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(m);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > threshold) ++rank;
    return rank;
}

int nilpotent_index(const Mat& n, int cap, double theta) {
    Mat p = Mat::Identity(n.rows(), n.cols());
    const double growth = std::max(1.0, n.norm());
    double level = theta;
    for (int k = 1; k <= cap; ++k) {
        p = p * n;
        if (p.norm() <= level) return k;
        level *= growth;
    }
    return cap + 1;
}

namespace {

// Single-linkage clustering of complex values with the given merge radius.
std::vector<int> single_linkage(const std::vector<std::complex<double>>& v,
                                double radius) {
    const int n = static_cast<int>(v.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(v[i] - v[j]) <= radius) parent[find(i)] = find(j);
    std::vector<int> label(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int root = find(i);
        if (label[root] < 0) label[root] = next++;
        label[i] = label[root];
    }
    return label;
}

// Orthonormal basis (columns) of the kernel of a, of the given dimension.
// The kernel vectors are the right singular vectors for the smallest
// singular values.
Mat kernel_basis(const Mat& a, int dim) {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const int cols = static_cast<int>(a.cols());
    return svd.matrixV().rightCols(std::min(dim, cols));
}

struct Cluster {
    std::complex<double> mean;
    int size;
    double diameter;
    std::vector<int> members;
};

std::vector<Cluster> cluster_eigenvalues(const Eigen::VectorXcd& eig,
                                         double radius) {
    std::vector<std::complex<double>> v(eig.data(), eig.data() + eig.size());
    std::vector<int> label = single_linkage(v, radius);
    int k = *std::max_element(label.begin(), label.end()) + 1;
    std::vector<Cluster> cl(k);
    for (auto& c : cl) {
        c.mean = 0.0;
        c.size = 0;
        c.diameter = 0.0;
    }
    for (size_t i = 0; i < v.size(); ++i) {
        cl[label[i]].mean += v[i];
        cl[label[i]].size += 1;
        cl[label[i]].members.push_back(static_cast<int>(i));
    }
    for (auto& c : cl) {
        c.mean /= double(c.size);
        for (int i : c.members)
            for (int j : c.members)
                c.diameter = std::max(c.diameter, std::abs(v[i] - v[j]));
    }
    std::sort(cl.begin(), cl.end(), [](const Cluster& a, const Cluster& b) {
        if (a.mean.real() != b.mean.real()) return a.mean.real() < b.mean.real();
        return a.mean.imag() < b.mean.imag();
    });
    return cl;
}

// Refine one invariant subspace (orthonormal columns b) by the generalized
// eigenspaces of m restricted to it. Returns bases of the pieces together
// with the cluster mean of each piece.
struct Piece {
    Mat basis;
    std::complex<double> mean;
};

std::vector<Piece> refine_subspace(const Mat& m, const Mat& b, double radius) {
    const int s = static_cast<int>(b.cols());
    const Mat a = b.adjoint() * m * b;
    Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    auto clusters = cluster_eigenvalues(es.eigenvalues(), radius);
    std::vector<Piece> out;
    if (clusters.size() == 1) {
        out.push_back({b, clusters[0].mean});
        return out;
    }
    for (const auto& c : clusters) {
        Mat shifted = a - c.mean * Mat::Identity(s, s);
        Mat power = Mat::Identity(s, s);
        for (int i = 0; i < c.size; ++i) power = power * shifted;
        Mat w = kernel_basis(power, c.size);
        // re-orthonormalize inside the ambient space
        Eigen::HouseholderQR<Mat> qr(b * w);
        Mat q = qr.householderQ() * Mat::Identity(b.rows(), c.size);
        out.push_back({q, c.mean});
    }
    return out;
}

}  // namespace

SpectralData spectral_decompose(const Mat& m, double tol) {
    if (m.rows() != m.cols()) throw DimensionMismatch("matrix not square");
    if (tol <= 0.0) throw DomainError("tol must be positive");
    const int r = static_cast<int>(m.rows());
    const double scale = norm_scale(m);
    const double radius = tol * scale;

    Eigen::ComplexEigenSolver<Mat> es(m, false);
    auto clusters = cluster_eigenvalues(es.eigenvalues(), radius);

    SpectralData sd;
    int offset = 0;
    sd.basis_change.resize(r, r);
    for (const auto& c : clusters) {
        Mat shifted = m - c.mean * Mat::Identity(r, r);
        Mat power = Mat::Identity(r, r);
        for (int i = 0; i < c.size; ++i) power = power * shifted;
        Mat basis = kernel_basis(power, c.size);
        sd.basis_change.middleCols(offset, c.size) = basis;
        // refined eigenvalue: trace of the restriction / size
        std::complex<double> lam =
            (basis.adjoint() * m * basis).trace() / double(c.size);
        sd.eigenvalues.push_back(lam);
        sd.multiplicities.push_back(c.size);
        sd.block_offsets.push_back(offset);
        const Mat n = basis.adjoint() * m * basis -
                      lam * Mat::Identity(c.size, c.size);
        const double theta = std::max(tol, 10.0 * c.diameter / scale) * scale;
        int idx = nilpotent_index(n, c.size, theta);
        sd.nilpotent_indices.push_back(std::min(idx, c.size));
        offset += c.size;
    }

    Eigen::JacobiSVD<Mat> svd(sd.basis_change);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 1e-12 * smax)
        throw SingularBasis("generalized eigenvector assembly is rank-deficient");
    return sd;
}

BlockDecomposition joint_block_decompose(const std::vector<Mat>& ms, double tol) {
    if (ms.empty()) throw DomainError("empty matrix tuple");
    if (tol <= 0.0) throw DomainError("tol must be positive");
    const int r = static_cast<int>(ms[0].rows());
    const int n = static_cast<int>(ms.size());

    const double defect = commutation_defect(ms);
    if (defect > tol)
        throw NotCommuting("commutation defect " + std::to_string(defect) +
                           " exceeds tolerance");

    // reality of the spectrum, per coordinate
    for (int i = 0; i < n; ++i) {
        const double scale = norm_scale(ms[i]);
        Eigen::ComplexEigenSolver<Mat> es(ms[i], false);
        for (int j = 0; j < r; ++j) {
            if (std::abs(es.eigenvalues()(j).imag()) > tol * scale)
                throw NonRealSpectrum("eigenvalue with imaginary part " +
                                      std::to_string(es.eigenvalues()(j).imag()) +
                                      " on coordinate " + std::to_string(i + 1));
        }
    }

    // successive refinement of invariant subspaces by each coordinate matrix
    std::vector<Piece> pieces;
    pieces.push_back({Mat::Identity(r, r), 0.0});
    for (int i = 0; i < n; ++i) {
        const double radius = tol * norm_scale(ms[i]);
        std::vector<Piece> next;
        for (const auto& p : pieces) {
            auto refined = refine_subspace(ms[i], p.basis, radius);
            for (auto& q : refined) next.push_back(std::move(q));
        }
        pieces = std::move(next);
    }

    // eigenvalue tuple of each block, by trace means
    struct BlockTmp {
        Mat basis;
        RVec lambda;
    };
    std::vector<BlockTmp> blocks;
    for (const auto& p : pieces) {
        BlockTmp b;
        b.basis = p.basis;
        b.lambda.resize(n);
        for (int i = 0; i < n; ++i) {
            std::complex<double> tr =
                (p.basis.adjoint() * ms[i] * p.basis).trace() /
                double(p.basis.cols());
            b.lambda(i) = tr.real();
        }
        blocks.push_back(std::move(b));
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const BlockTmp& a, const BlockTmp& b) {
                  for (int i = 0; i < a.lambda.size(); ++i) {
                      if (a.lambda(i) != b.lambda(i)) return a.lambda(i) < b.lambda(i);
                  }
                  return false;
              });

    BlockDecomposition bd;
    bd.basis_change.resize(r, r);
    int offset = 0;
    for (const auto& b : blocks) {
        const int s = static_cast<int>(b.basis.cols());
        bd.block_sizes.push_back(s);
        bd.block_points.push_back(b.lambda);
        bd.block_offsets.push_back(offset);
        bd.basis_change.middleCols(offset, s) = b.basis;
        offset += s;
    }
    if (offset != r) throw SingularBasis("block sizes do not fill the space");

    Eigen::JacobiSVD<Mat> svd(bd.basis_change);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 1e-12 * smax)
        throw SingularBasis("joint eigenbasis is rank-deficient");
    return bd;
}

}  // namespace az
