#include "azumaya/point_map.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "azumaya/rational.hpp"

namespace az {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= double(i);
    return f;
}

double max_spectral_imag(const std::vector<Mat>& ms) {
    double worst = 0.0;
    for (const auto& m : ms) {
        Eigen::ComplexEigenSolver<Mat> es(m, false);
        const double scale = norm_scale(m);
        for (int j = 0; j < es.eigenvalues().size(); ++j)
            worst = std::max(worst, std::abs(es.eigenvalues()(j).imag()) / scale);
    }
    return worst;
}

// Dimensions of the powers of the joint nilpotent radical acting on the
// block: dim V, dim I V, dim I^2 V, ... until zero.
std::vector<int> radical_power_dims(const std::vector<Mat>& nilpotents, int s,
                                    double theta) {
    std::vector<int> dims;
    dims.push_back(s);
    // products of j generators, tracked as a spanning set of column spaces
    std::vector<Mat> frontier = {Mat::Identity(s, s)};
    for (int j = 1; j <= s; ++j) {
        std::vector<Mat> next;
        for (const auto& w : frontier)
            for (const auto& n : nilpotents) next.push_back(n * w);
        if (next.empty()) {
            dims.push_back(0);
            break;
        }
        Mat stacked(s, static_cast<int>(next.size()) * s);
        for (size_t t = 0; t < next.size(); ++t)
            stacked.middleCols(static_cast<int>(t) * s, s) = next[t];
        int d = numerical_rank(stacked, theta);
        dims.push_back(d);
        if (d == 0) break;
        frontier = std::move(next);
        // keep the frontier small: collapse to an orthonormal column basis
        if (frontier.size() > 8) {
            Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinU);
            Mat basis = svd.matrixU().leftCols(d);
            frontier = {basis};
        }
    }
    return dims;
}

std::vector<int> filtration_from_dims(const std::vector<int>& dims) {
    // dims = [dim V, dim IV, dim I^2 V, ..., 0]; ascending chain of the
    // nonzero entries, deepest first
    std::vector<int> f;
    for (int v : dims)
        if (v > 0) f.push_back(v);
    std::reverse(f.begin(), f.end());
    return f;
}

std::vector<int> jordan_sizes(const Mat& n, double theta) {
    const int s = static_cast<int>(n.rows());
    std::vector<int> ranks;
    ranks.push_back(s);
    Mat p = n;
    for (int j = 1; j <= s; ++j) {
        ranks.push_back(numerical_rank(p, theta * std::pow(std::max(1.0, n.norm()), j - 1)));
        if (ranks.back() == 0) break;
        p = p * n;
    }
    while (ranks.size() < static_cast<size_t>(s) + 2) ranks.push_back(0);
    // number of blocks of size >= j equals rank(n^{j-1}) - rank(n^j)
    std::vector<int> sizes;
    for (int j = 1; j <= s; ++j) {
        int count_ge_j = ranks[j - 1] - ranks[j];
        int count_ge_j1 = ranks[j] - ranks[j + 1];
        int exactly_j = count_ge_j - count_ge_j1;
        for (int t = 0; t < exactly_j; ++t) sizes.push_back(j);
    }
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

struct BlockData {
    int size;
    RVec lambda;
    std::vector<Mat> nilpotents;  // per axis, in the block basis
};

std::vector<BlockData> block_data(const AzumayaPointMap& map,
                                  const BlockDecomposition& bd) {
    Mat p_inv = bd.basis_change.partialPivLu().solve(
        Mat::Identity(map.r, map.r));
    std::vector<BlockData> out;
    for (size_t l = 0; l < bd.block_sizes.size(); ++l) {
        BlockData b;
        b.size = bd.block_sizes[l];
        b.lambda = bd.block_points[l];
        for (int i = 0; i < map.n; ++i) {
            Mat rest = p_inv.middleRows(bd.block_offsets[l], b.size) * map.ms[i] *
                       bd.basis_change.middleCols(bd.block_offsets[l], b.size);
            b.nilpotents.push_back(rest - b.lambda(i) * Mat::Identity(b.size, b.size));
        }
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace

AdmissibilityReport validate(const AzumayaPointMap& map) {
    AdmissibilityReport rep;
    rep.tol = map.tol;
    rep.commutation_defect = commutation_defect(map.ms);
    rep.max_spectral_imag = max_spectral_imag(map.ms);
    if (rep.commutation_defect > map.tol) {
        rep.admissible = false;
        rep.reason = "NotCommuting";
    } else if (rep.max_spectral_imag > map.tol) {
        rep.admissible = false;
        rep.reason = "NonRealSpectrum";
    } else {
        rep.admissible = true;
    }
    return rep;
}

void require_admissible(const AzumayaPointMap& map) {
    auto rep = validate(map);
    if (rep.admissible) return;
    if (rep.reason == "NotCommuting")
        throw NotCommuting("commutation defect " +
                           std::to_string(rep.commutation_defect) +
                           " exceeds tolerance");
    throw NonRealSpectrum("max spectral imaginary part " +
                          std::to_string(rep.max_spectral_imag) +
                          " exceeds tolerance");
}

SupportScheme support(const AzumayaPointMap& map) {
    require_admissible(map);
    SupportScheme s;
    s.blocks = joint_block_decompose(map.ms, map.tol);
    double scale = 1.0;
    for (const auto& m : map.ms) scale = std::max(scale, norm_scale(m));
    auto blocks = block_data(map, s.blocks);
    for (const auto& b : blocks) {
        SupportPoint pt;
        pt.lambda = b.lambda;
        pt.length = b.size;
        const double theta = 10.0 * map.tol * scale;
        for (int i = 0; i < map.n; ++i) {
            int idx = nilpotent_index(b.nilpotents[i], b.size, theta);
            pt.nilpotency_orders.push_back(std::min(idx, b.size));
        }
        pt.filtration =
            filtration_from_dims(radical_power_dims(b.nilpotents, b.size, theta));
        s.points.push_back(std::move(pt));
    }
    return s;
}

Mat evaluate_block(const Jet& jet, const std::vector<Mat>& nilpotents,
                   int block_size) {
    const int n = jet.arity();
    MultiIndexSet mis(n, jet.order);
    // powers of each nilpotent generator up to the block size cap
    std::vector<std::vector<Mat>> powers(n);
    for (int i = 0; i < n; ++i) {
        powers[i].push_back(Mat::Identity(block_size, block_size));
        for (int e = 1; e < block_size && e <= jet.order; ++e)
            powers[i].push_back(powers[i].back() * nilpotents[i]);
    }
    Mat acc = Mat::Zero(block_size, block_size);
    for (int rk = 0; rk < mis.size(); ++rk) {
        const auto& alpha = mis.at(rk);
        // a monomial with any power at or beyond the block size is exactly
        // zero on the block
        bool vanishes = false;
        double alpha_fact = 1.0;
        for (int i = 0; i < n; ++i) {
            if (alpha[i] >= block_size) {
                vanishes = true;
                break;
            }
            alpha_fact *= factorial(alpha[i]);
        }
        if (vanishes) continue;
        Cplx coeff = jet.derivs[rk] / alpha_fact;
        if (coeff == Cplx(0.0)) continue;
        Mat term = Mat::Identity(block_size, block_size);
        for (int i = 0; i < n; ++i)
            if (alpha[i] > 0) term = term * powers[i][alpha[i]];
        acc += coeff * term;
    }
    return acc;
}

Mat evaluate(const AzumayaPointMap& map, const FnSpec& f) {
    require_admissible(map);
    if (f.arity != map.n)
        throw DimensionMismatch("function arity does not match target dimension");
    auto bd = joint_block_decompose(map.ms, map.tol);
    auto blocks = block_data(map, bd);
    Mat assembled = Mat::Zero(map.r, map.r);
    for (size_t l = 0; l < blocks.size(); ++l) {
        const auto& b = blocks[l];
        const int cap = map.n * (b.size - 1);
        int d = map.k.capped(cap);
        // polynomial jets are exact and vanish beyond the total degree
        if (f.kind == FnSpec::Kind::Polynomial)
            d = std::min(d, f.num.total_degree());
        std::vector<double> pt(b.lambda.data(), b.lambda.data() + b.lambda.size());
        Jet jet;
        try {
            jet = extract_jet(f, pt, d);
        } catch (const PoleAtPoint& e) {
            throw PoleAtSupport(std::string("function undefined at support point: ") +
                                e.what());
        }
        assembled.block(bd.block_offsets[l], bd.block_offsets[l], b.size, b.size) =
            evaluate_block(jet, b.nilpotents, b.size);
    }
    Mat p_inv =
        bd.basis_change.partialPivLu().solve(Mat::Identity(map.r, map.r));
    return bd.basis_change * assembled * p_inv;
}

namespace {

// Exact minimal polynomial of a matrix whose double entries are read as
// exact rationals; Krylov sequence over the Gaussian rationals.
std::vector<GRat> exact_minimal_polynomial(const Mat& m) {
    const int r = static_cast<int>(m.rows());
    RatMat a(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            a(i, j) = GRat::from_doubles(m(i, j).real(), m(i, j).imag());
    std::vector<RatMat> pow;
    pow.push_back(RatMat::identity(r));
    for (int d = 1; d <= r; ++d) {
        pow.push_back(pow.back() * a);
        // try to express pow[d] in terms of lower powers
        RatMat sys(r * r, d);
        std::vector<GRat> rhs(r * r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                for (int c = 0; c < d; ++c) sys(i * r + j, c) = pow[c](i, j);
                rhs[i * r + j] = pow[d](i, j);
            }
        std::vector<GRat> coef;
        if (sys.solve(rhs, coef)) {
            // verify (solve only checks consistency of the eliminated system)
            RatMat check = pow[d];
            for (int c = 0; c < d; ++c) check = check - pow[c] * coef[c];
            if (check.is_zero()) {
                // monic: y^d - sum coef_c y^c
                std::vector<GRat> poly(d + 1);
                for (int c = 0; c < d; ++c) poly[c] = -coef[c];
                poly[d] = GRat(1);
                return poly;
            }
        }
    }
    return {};
}

}  // namespace

Poly minimal_annihilator(const AzumayaPointMap& map, int axis) {
    require_admissible(map);
    if (axis < 0 || axis >= map.n) throw DimensionMismatch("axis out of range");
    auto s = support(map);
    double scale = norm_scale(map.ms[axis]);

    // group support points by their axis value, exponent = max nilpotency order
    std::vector<std::pair<double, int>> factors;  // (lambda, power)
    for (const auto& pt : s.points) {
        const double lam = pt.lambda(axis);
        const int p = pt.nilpotency_orders[axis];
        bool merged = false;
        for (auto& f : factors) {
            if (std::abs(f.first - lam) <= map.tol * scale) {
                f.second = std::max(f.second, p);
                merged = true;
                break;
            }
        }
        if (!merged) factors.emplace_back(lam, p);
    }
    std::sort(factors.begin(), factors.end());
    Poly result = Poly::constant(1.0);
    for (const auto& [lam, p] : factors) {
        Poly lin({-lam, 1.0});
        for (int i = 0; i < p; ++i) result = result * lin;
    }

    // exact refinement: when the Krylov minimal polynomial of the exact
    // floating input has the same degree, its coefficients are the exact
    // answer (rational inputs give exact factors)
    auto exact = exact_minimal_polynomial(map.ms[axis]);
    if (!exact.empty() &&
        static_cast<int>(exact.size()) - 1 == result.degree()) {
        bool real = true;
        std::vector<double> coeffs(exact.size());
        for (size_t i = 0; i < exact.size(); ++i) {
            if (std::abs(exact[i].to_double_im()) > map.tol * scale) {
                real = false;
                break;
            }
            coeffs[i] = exact[i].to_double_re();
        }
        if (real) {
            Poly candidate(coeffs);
            // accept only if it agrees with the clustered product
            bool close = true;
            for (int i = 0; i <= result.degree(); ++i) {
                double ref = std::max(1.0, std::abs(result.coeff(i)));
                if (std::abs(candidate.coeff(i) - result.coeff(i)) >
                    1e-4 * ref) {
                    close = false;
                    break;
                }
            }
            if (close) return candidate;
        }
    }
    return result;
}

ModuleStructure pushforward_module(const AzumayaPointMap& map) {
    require_admissible(map);
    auto s = support(map);
    auto blocks = block_data(map, s.blocks);
    double scale = 1.0;
    for (const auto& m : map.ms) scale = std::max(scale, norm_scale(m));
    const double theta = 10.0 * map.tol * scale;

    ModuleStructure ms;
    for (size_t l = 0; l < blocks.size(); ++l) {
        const auto& b = blocks[l];
        ModuleFiber fib;
        fib.lambda = b.lambda;
        fib.dim = b.size;
        fib.filtration = s.points[l].filtration;
        for (int i = 0; i < map.n; ++i) {
            if (b.nilpotents[i].norm() > theta)
                fib.nilpotent_generators.push_back(b.nilpotents[i]);
        }
        // indecomposable summand sizes: Jordan type of a generic combination
        Mat generic = Mat::Zero(b.size, b.size);
        for (int i = 0; i < map.n; ++i)
            generic += (1.0 / std::sqrt(2.0 + double(i))) * b.nilpotents[i];
        fib.summand_sizes = jordan_sizes(generic, theta);
        ms.fibers.push_back(std::move(fib));
    }
    return ms;
}

}  // namespace az
