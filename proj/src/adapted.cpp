#include "azumaya/adapted.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace az {

void PolyForm::add_term(std::vector<int> idx, MPoly coeff) {
    if (static_cast<int>(idx.size()) != degree)
        throw DimensionMismatch("index tuple length does not match form degree");
    for (size_t i = 0; i + 1 < idx.size(); ++i)
        if (idx[i] >= idx[i + 1])
            throw DomainError("index tuples must be strictly increasing");
    auto it = terms.find(idx);
    if (it == terms.end())
        terms.emplace(std::move(idx), std::move(coeff));
    else
        it->second = it->second + coeff;
}

PolyForm PolyForm::constant_form(
    int n, int degree,
    const std::vector<std::pair<std::vector<int>, double>>& data) {
    PolyForm f;
    f.n = n;
    f.degree = degree;
    for (const auto& [idx, c] : data) f.add_term(idx, MPoly::constant(n, c));
    return f;
}

PolyForm PolyForm::g2_standard() {
    // e123 + e145 + e167 + e246 - e257 - e347 - e356 (0-based below)
    return constant_form(7, 3,
                         {{{0, 1, 2}, 1.0},
                          {{0, 3, 4}, 1.0},
                          {{0, 5, 6}, 1.0},
                          {{1, 3, 5}, 1.0},
                          {{1, 4, 6}, -1.0},
                          {{2, 3, 6}, -1.0},
                          {{2, 4, 5}, -1.0}});
}

PolyForm PolyForm::area_form_r2() {
    return constant_form(2, 2, {{{0, 1}, 1.0}});
}

namespace {

// Tracked finite-difference slope of a branch at each grid point.
std::vector<RVec> track_slopes(const Track& t, const std::vector<double>& grid) {
    const int g = static_cast<int>(t.samples.size());
    std::vector<RVec> out(g);
    for (int j = 0; j < g; ++j) {
        const int jm = std::max(0, j - 1);
        const int jp = std::min(g - 1, j + 1);
        const double dx = t.samples[jp].x - t.samples[jm].x;
        out[j] = (t.samples[jp].lambda - t.samples[jm].lambda) / dx;
    }
    return out;
}

double form_on_vectors(const PolyForm& alpha,
                       const std::vector<std::vector<double>>& vecs,
                       const std::vector<double>& at_point) {
    // alpha(v_1, ..., v_p) = sum over terms c_I det(rows I of [v_1 ... v_p])
    const int p = alpha.degree;
    double acc = 0.0;
    for (const auto& [idx, coeff] : alpha.terms) {
        // determinant of the p x p minor with rows idx
        Eigen::MatrixXd m(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) m(i, j) = vecs[j][idx[i]];
        acc += coeff.eval(at_point) * m.determinant();
    }
    return acc;
}

}  // namespace

std::vector<std::vector<double>> pullback_to_branches(const PolyForm& alpha,
                                                      const BranchDiagram& diag) {
    if (alpha.n != diag.n)
        throw DimensionMismatch("form dimension does not match target dimension");
    std::vector<std::vector<double>> out;
    for (const auto& t : diag.tracks) {
        const int g = static_cast<int>(t.samples.size());
        std::vector<double> coeffs(g, 0.0);
        if (alpha.degree > 1) {
            out.push_back(std::move(coeffs));  // degree exceeds base dimension
            continue;
        }
        auto slopes = track_slopes(t, diag.grid);
        for (int j = 0; j < g; ++j) {
            std::vector<double> y(t.samples[j].lambda.data(),
                                  t.samples[j].lambda.data() + diag.n);
            if (alpha.degree == 0) {
                coeffs[j] = alpha.terms.empty()
                                ? 0.0
                                : alpha.terms.begin()->second.eval(y);
            } else {
                double acc = 0.0;
                for (const auto& [idx, c] : alpha.terms)
                    acc += c.eval(y) * slopes[j](idx[0]);
                coeffs[j] = acc;
            }
        }
        out.push_back(std::move(coeffs));
    }
    return out;
}

AdaptedReport check_relative_dim0(const BranchDiagram& diag) {
    AdaptedReport rep;
    rep.pass = true;
    const int min_run = std::max<int>(3, static_cast<int>(diag.grid.size()) / 100);
    for (const auto& t : diag.tracks) {
        ComponentVerdict v;
        v.component = t.id;
        v.tracks = {t.id};
        v.pass = true;
        // a track constant in every target coordinate over a subinterval
        // makes a fiber of the reduced map positive-dimensional
        int run = 1;
        double level = 0.0;
        for (const auto& s : t.samples)
            level = std::max(level, s.lambda.lpNorm<Eigen::Infinity>());
        const double tol = 1e-9 * std::max(1.0, level);
        for (size_t j = 1; j < t.samples.size(); ++j) {
            const double step = (t.samples[j].lambda - t.samples[j - 1].lambda)
                                    .lpNorm<Eigen::Infinity>();
            run = step <= tol ? run + 1 : 1;
            if (run >= min_run) {
                v.pass = false;
                break;
            }
        }
        if (!v.pass) rep.pass = false;
        rep.components.push_back(v);
    }
    if (!rep.pass) rep.detail = "constant branch track found";
    return rep;
}

AdaptedReport check_lagrangian(const BranchDiagram& diag, const PolyForm& omega,
                               int base_dim, int target_dim, double tol) {
    if (2 * base_dim != target_dim)
        throw DimensionCondition("domain dimension must be half the target dimension");
    AdaptedReport rep = check_relative_dim0(diag);
    if (!rep.pass) {
        rep.detail = "relative dimension 0 fails: " + rep.detail;
        return rep;
    }
    auto pulled = pullback_to_branches(omega, diag);
    double worst = 0.0;
    for (size_t t = 0; t < pulled.size(); ++t) {
        double res = 0.0;
        for (double c : pulled[t]) res = std::max(res, std::abs(c));
        rep.components[t].residual = res;
        rep.components[t].pass = res < tol;
        worst = std::max(worst, res);
    }
    rep.residual = worst;
    rep.pass = worst < tol;
    return rep;
}

namespace {

double slag_residual(const std::vector<Cplx>& w, double theta, bool im) {
    double worst = 0.0;
    const Cplx rot = std::exp(Cplx(0.0, -theta));
    for (const auto& v : w) {
        const Cplx z = rot * v;
        worst = std::max(worst, std::abs(im ? z.imag() : z.real()));
    }
    return worst;
}

double slag_sq(const std::vector<Cplx>& w, double theta, bool im) {
    double acc = 0.0;
    const Cplx rot = std::exp(Cplx(0.0, -theta));
    for (const auto& v : w) {
        const Cplx z = rot * v;
        const double c = im ? z.imag() : z.real();
        acc += c * c;
    }
    return acc;
}

}  // namespace

AdaptedReport check_slag(const BranchDiagram& diag, SlagConvention convention,
                         double tol) {
    if (diag.n != 2)
        throw DimensionCondition("special Lagrangian check needs target R^2");
    AdaptedReport rep;
    rep.pass = true;
    const bool im = convention == SlagConvention::Im;
    for (const auto& t : diag.tracks) {
        ComponentVerdict v;
        v.component = t.id;
        v.tracks = {t.id};
        auto slopes = track_slopes(t, diag.grid);
        std::vector<Cplx> w(slopes.size());
        double scale = 1.0;
        for (size_t j = 0; j < slopes.size(); ++j) {
            w[j] = Cplx(slopes[j](0), slopes[j](1));
            scale = std::max(scale, std::abs(w[j]));
        }
        // coarse grid then golden-section polish of the integrated square
        const int steps = 180;
        double best_theta = 0.0, best = std::numeric_limits<double>::max();
        for (int s = 0; s < steps; ++s) {
            const double theta = M_PI * double(s) / double(steps);
            const double val = slag_sq(w, theta, im);
            if (val < best) {
                best = val;
                best_theta = theta;
            }
        }
        double a = best_theta - M_PI / double(steps);
        double b = best_theta + M_PI / double(steps);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - gr * (b - a);
        double d2 = a + gr * (b - a);
        double fc = slag_sq(w, c, im), fd = slag_sq(w, d2, im);
        for (int it = 0; it < 80; ++it) {
            if (fc < fd) {
                b = d2;
                d2 = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = slag_sq(w, c, im);
            } else {
                a = c;
                c = d2;
                fc = fd;
                d2 = a + gr * (b - a);
                fd = slag_sq(w, d2, im);
            }
        }
        double theta = 0.5 * (a + b);
        // report mod pi in [-pi/2, pi/2)
        theta = std::fmod(theta, M_PI);
        if (theta >= M_PI / 2.0) theta -= M_PI;
        if (theta < -M_PI / 2.0) theta += M_PI;
        v.theta = theta;
        v.residual = slag_residual(w, theta, im) / scale;
        v.pass = v.residual < tol;
        if (!v.pass) rep.pass = false;
        rep.residual = std::max(rep.residual, v.residual);
        rep.components.push_back(v);
    }
    return rep;
}

AdaptedReport check_calibration_vanishing_plane(
    const PolyForm& alpha, const std::vector<std::vector<double>>& plane,
    const std::vector<double>& at_point, double tol) {
    AdaptedReport rep;
    if (static_cast<int>(plane.size()) != alpha.degree)
        throw DimensionCondition("plane dimension must equal the form degree");
    for (const auto& v : plane)
        if (static_cast<int>(v.size()) != alpha.n)
            throw DimensionMismatch("plane vector dimension mismatch");
    rep.residual = std::abs(form_on_vectors(alpha, plane, at_point));
    rep.pass = rep.residual < tol;
    return rep;
}

AdaptedReport check_calibration_vanishing(const BranchDiagram& diag,
                                          const PolyForm& alpha,
                                          int expected_base_dim, double tol) {
    AdaptedReport rep;
    const int base_dim = 1;  // diagrams live over a 1-dimensional base
    if (base_dim != expected_base_dim)
        throw DimensionCondition("base dimension does not match the expected one");
    if (alpha.degree > base_dim) {
        // the restriction of a form of degree beyond the base dimension
        // vanishes identically
        rep.pass = true;
        rep.residual = 0.0;
        rep.detail = "form degree exceeds base dimension";
        return rep;
    }
    auto pulled = pullback_to_branches(alpha, diag);
    double worst = 0.0;
    for (const auto& track_coeffs : pulled)
        for (double c : track_coeffs) worst = std::max(worst, std::abs(c));
    rep.residual = worst;
    rep.pass = worst < tol;
    (void)tol;
    return rep;
}

AdaptedReport check_j_holomorphic(const PlanarMatrixMap& map, double u0,
                                  double u1, double v0, double v1, int grid,
                                  double h, double tol) {
    if (map.n % 2 != 0)
        throw DimensionCondition("holomorphicity check needs an even target dimension");
    AdaptedReport rep;
    const int m = map.n / 2;
    double worst = 0.0;
    double scale = 1e-12;
    for (int iu = 0; iu < grid; ++iu) {
        for (int iv = 0; iv < grid; ++iv) {
            const double u = u0 + (u1 - u0) * (double(iu) + 0.5) / double(grid);
            const double v = v0 + (v1 - v0) * (double(iv) + 0.5) / double(grid);
            auto decompose = [&](double uu, double vv) {
                AzumayaPointMap pm{map.r, map.n, map.fiber(uu, vv),
                                   Smoothness::infinite(), map.tol};
                try {
                    return joint_block_decompose(pm.ms, pm.tol);
                } catch (const NotCommuting& e) {
                    throw FiberNotAdmissible(uu, e.what());
                } catch (const NonRealSpectrum& e) {
                    throw FiberNotAdmissible(uu, e.what());
                }
            };
            BlockDecomposition center = decompose(u, v);
            BlockDecomposition up = decompose(u + h, v);
            BlockDecomposition um = decompose(u - h, v);
            BlockDecomposition vp = decompose(u, v + h);
            BlockDecomposition vm = decompose(u, v - h);
            auto nearest = [&](const BlockDecomposition& bd, const RVec& ref) {
                int best = 0;
                double bd_best = std::numeric_limits<double>::max();
                for (size_t b = 0; b < bd.block_points.size(); ++b) {
                    const double dist = (bd.block_points[b] - ref).squaredNorm();
                    if (dist < bd_best) {
                        bd_best = dist;
                        best = static_cast<int>(b);
                    }
                }
                return bd.block_points[best];
            };
            for (const auto& lam : center.block_points) {
                const RVec lup = nearest(up, lam), lum = nearest(um, lam);
                const RVec lvp = nearest(vp, lam), lvm = nearest(vm, lam);
                for (int c = 0; c < m; ++c) {
                    const Cplx du(
                        (lup(2 * c) - lum(2 * c)) / (2.0 * h),
                        (lup(2 * c + 1) - lum(2 * c + 1)) / (2.0 * h));
                    const Cplx dv(
                        (lvp(2 * c) - lvm(2 * c)) / (2.0 * h),
                        (lvp(2 * c + 1) - lvm(2 * c + 1)) / (2.0 * h));
                    // d/dzbar = (d/du + i d/dv) / 2
                    const Cplx cr = 0.5 * (du + Cplx(0.0, 1.0) * dv);
                    worst = std::max(worst, std::abs(cr));
                    scale = std::max({scale, std::abs(du), std::abs(dv)});
                }
            }
        }
    }
    rep.residual = worst;
    rep.pass = worst < tol * std::max(1.0, scale);
    return rep;
}

}  // namespace az
