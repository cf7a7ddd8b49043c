#include "azumaya/worldvolume.hpp"

#include <omp.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace az {

namespace {

double map_scale(const MatrixCurveMap& map, const std::vector<double>& xs) {
    double s = 1.0;
    for (double x : {xs.front(), xs[xs.size() / 2], xs.back()})
        for (const auto& m : map.fiber(x)) s = std::max(s, m.norm());
    return s;
}

std::vector<double> uniform_grid(double x0, double x1, int grid_size) {
    std::vector<double> xs(grid_size);
    for (int i = 0; i < grid_size; ++i)
        xs[i] = x0 + (x1 - x0) * double(i) / double(grid_size - 1);
    return xs;
}

}  // namespace

FiberData analyze_fiber(const MatrixCurveMap& map, double x) {
    AzumayaPointMap pm = map.point_at(x);
    SupportScheme s;
    try {
        s = support(pm);
    } catch (const NotCommuting& e) {
        throw FiberNotAdmissible(x, std::string("fiber not admissible: ") + e.what());
    } catch (const NonRealSpectrum& e) {
        throw FiberNotAdmissible(x, std::string("fiber not admissible: ") + e.what());
    }
    FiberData f;
    f.basis_change = s.blocks.basis_change;
    f.offsets = s.blocks.block_offsets;
    for (const auto& p : s.points) {
        f.points.push_back(p.lambda);
        f.lengths.push_back(p.length);
        f.nilp_orders.push_back(p.nilpotency_orders);
        f.filtrations.push_back(p.filtration);
    }
    return f;
}

std::vector<FiberData> analyze_fibers_serial(const MatrixCurveMap& map,
                                             const std::vector<double>& xs) {
    std::vector<FiberData> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = analyze_fiber(map, xs[i]);
    return out;
}

std::vector<FiberData> analyze_fibers_parallel(const MatrixCurveMap& map,
                                               const std::vector<double>& xs,
                                               int threads) {
    std::vector<FiberData> out(xs.size());
    std::vector<std::exception_ptr> errors(xs.size());
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long i = 0; i < static_cast<long>(xs.size()); ++i) {
        try {
            out[i] = analyze_fiber(map, xs[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// ---------------------------------------------------------------------------
// Track merge: deterministic sequential pass over the fiber results.
// ---------------------------------------------------------------------------
namespace {

struct ActiveTrack {
    int track_index;  // into diagram.tracks
    RVec predicted;
    int mult;
};

// Enumerate assignments of tracks to blocks with exact capacity fill,
// returning the minimum-cost one (tracks considered in id order, blocks in
// lexicographic order, so the first minimum found is the lexicographic
// resolution of ties).
struct AssignmentResult {
    bool feasible = false;
    std::vector<int> block_of_track;
    double cost = 0.0;
    bool tie = false;
};

void assign_rec(const std::vector<ActiveTrack>& tracks,
                const std::vector<RVec>& points, const std::vector<int>& lengths,
                size_t idx, std::vector<int>& fill, std::vector<int>& cur,
                double cost, AssignmentResult& best) {
    if (best.feasible && cost > best.cost + 1e-12) return;  // prune
    if (idx == tracks.size()) {
        for (size_t b = 0; b < lengths.size(); ++b)
            if (fill[b] != lengths[b]) return;
        if (!best.feasible || cost < best.cost - 1e-12) {
            best.feasible = true;
            best.cost = cost;
            best.block_of_track = cur;
            best.tie = false;
        } else if (std::abs(cost - best.cost) <= 1e-12) {
            best.tie = true;
        }
        return;
    }
    const auto& t = tracks[idx];
    for (size_t b = 0; b < points.size(); ++b) {
        if (fill[b] + t.mult > lengths[b]) continue;
        double c = (t.predicted - points[b]).squaredNorm() * double(t.mult);
        fill[b] += t.mult;
        cur[idx] = static_cast<int>(b);
        assign_rec(tracks, points, lengths, idx + 1, fill, cur, cost + c, best);
        fill[b] -= t.mult;
        cur[idx] = -1;
    }
}

AssignmentResult assign_tracks(const std::vector<ActiveTrack>& tracks,
                               const FiberData& fiber) {
    AssignmentResult best;
    std::vector<int> fill(fiber.lengths.size(), 0);
    std::vector<int> cur(tracks.size(), -1);
    assign_rec(tracks, fiber.points, fiber.lengths, 0, fill, cur, 0.0, best);
    return best;
}

RVec predict(const Track& t) {
    const auto& s = t.samples;
    if (s.size() == 1) return s.back().lambda;
    const auto& a = s[s.size() - 2].lambda;
    const auto& b = s.back().lambda;
    return 2.0 * b - a;
}

TrackSample make_sample(double x, const FiberData& f, int block, int mult) {
    TrackSample s;
    s.x = x;
    s.lambda = f.points[block];
    s.mult = mult;
    s.block_length = f.lengths[block];
    s.block_index = block;
    s.nilp_orders = f.nilp_orders[block];
    s.nilp_order = 1;
    for (int p : s.nilp_orders) s.nilp_order = std::max(s.nilp_order, p);
    s.filtration = f.filtrations[block];
    return s;
}

// Track two eigenvalue branches into a probe fiber by proximity to
// reference values; returns the matched pair of points.
std::pair<RVec, RVec> match_pair(const FiberData& f, const RVec& ref_a,
                                 const RVec& ref_b) {
    int best_a = 0, best_b = 0;
    double da = std::numeric_limits<double>::max();
    double db = std::numeric_limits<double>::max();
    for (size_t i = 0; i < f.points.size(); ++i) {
        double va = (f.points[i] - ref_a).squaredNorm();
        double vb = (f.points[i] - ref_b).squaredNorm();
        if (va < da) {
            da = va;
            best_a = static_cast<int>(i);
        }
        if (vb < db) {
            db = vb;
            best_b = static_cast<int>(i);
        }
    }
    return {f.points[best_a], f.points[best_b]};
}

}  // namespace

BranchDiagram analyze(const MatrixCurveMap& map, int grid_size, int threads) {
    if (grid_size < 2) throw DomainError("grid size must be at least 2");
    BranchDiagram d;
    d.x0 = map.x0;
    d.x1 = map.x1;
    d.circle = map.circle;
    d.r = map.r;
    d.n = map.n;
    d.tol = map.tol;
    d.grid = uniform_grid(map.x0, map.x1, grid_size);

    std::vector<FiberData> fibers =
        threads == 1 ? analyze_fibers_serial(map, d.grid)
                     : analyze_fibers_parallel(map, d.grid, threads);

    const double scale = map_scale(map, d.grid);
    const double match_tol = 10.0 * map.tol * scale;

    // seed tracks from the first fiber
    std::vector<ActiveTrack> active;
    for (size_t b = 0; b < fibers[0].points.size(); ++b) {
        Track t;
        t.id = static_cast<int>(d.tracks.size());
        t.first_fiber = 0;
        t.samples.push_back(
            make_sample(d.grid[0], fibers[0], static_cast<int>(b),
                        fibers[0].lengths[b]));
        active.push_back({t.id, t.samples.back().lambda, t.samples.back().mult});
        d.tracks.push_back(std::move(t));
    }

    for (size_t j = 1; j < fibers.size(); ++j) {
        for (auto& a : active) a.predicted = predict(d.tracks[a.track_index]);
        AssignmentResult res = assign_tracks(active, fibers[j]);
        if (res.feasible) {
            if (res.tie) d.ambiguous_matches.push_back(d.grid[j]);
            for (size_t t = 0; t < active.size(); ++t) {
                d.tracks[active[t].track_index].samples.push_back(
                    make_sample(d.grid[j], fibers[j], res.block_of_track[t],
                                active[t].mult));
            }
        } else {
            // block structure changed; close all tracks and reseed
            BranchEvent ev;
            ev.kind = BranchEvent::Kind::StructureChange;
            ev.x = 0.5 * (d.grid[j - 1] + d.grid[j]);
            for (const auto& a : active) ev.tracks.push_back(a.track_index);
            d.events.push_back(std::move(ev));
            active.clear();
            for (size_t b = 0; b < fibers[j].points.size(); ++b) {
                Track t;
                t.id = static_cast<int>(d.tracks.size());
                t.first_fiber = static_cast<int>(j);
                t.samples.push_back(make_sample(d.grid[j], fibers[j],
                                                static_cast<int>(b),
                                                fibers[j].lengths[b]));
                active.push_back(
                    {t.id, t.samples.back().lambda, t.samples.back().mult});
                d.tracks.push_back(std::move(t));
            }
        }
    }

    // ---- crossing and overlap detection over pairs of co-active tracks ----
    for (size_t a = 0; a < d.tracks.size(); ++a) {
        for (size_t b = a + 1; b < d.tracks.size(); ++b) {
            const Track& ta = d.tracks[a];
            const Track& tb = d.tracks[b];
            int lo = std::max(ta.first_fiber, tb.first_fiber);
            int hi = std::min(ta.last_fiber(), tb.last_fiber());
            if (lo > hi) continue;

            // coincidence flags per shared fiber
            std::vector<char> close(hi - lo + 1);
            for (int f = lo; f <= hi; ++f) {
                const RVec diff =
                    ta.at_fiber(f).lambda - tb.at_fiber(f).lambda;
                close[f - lo] = diff.lpNorm<Eigen::Infinity>() <= match_tol;
            }
            // overlap: runs of >= 3 coincident fibers
            int run_start = -1;
            for (int f = lo; f <= hi + 1; ++f) {
                bool c = f <= hi && close[f - lo];
                if (c && run_start < 0) run_start = f;
                if (!c && run_start >= 0) {
                    if (f - run_start >= 3) {
                        BranchEvent ev;
                        ev.kind = BranchEvent::Kind::Overlap;
                        ev.x = d.grid[run_start];
                        ev.x_end = d.grid[f - 1];
                        ev.tracks = {ta.id, tb.id};
                        d.events.push_back(std::move(ev));
                    } else {
                        // short coincidence counts as a crossing candidate,
                        // refined below via the sign-change scan
                    }
                    run_start = -1;
                }
            }
            // crossings: sign change of the difference in every component
            for (int f = lo; f < hi; ++f) {
                const RVec d0 = ta.at_fiber(f).lambda - tb.at_fiber(f).lambda;
                const RVec d1 =
                    ta.at_fiber(f + 1).lambda - tb.at_fiber(f + 1).lambda;
                bool cand = true;
                int pivot_axis = -1;
                double pivot_span = 0.0;
                for (int i = 0; i < d.n; ++i) {
                    const bool zero0 = std::abs(d0(i)) <= match_tol;
                    const bool zero1 = std::abs(d1(i)) <= match_tol;
                    const bool sign_change = d0(i) * d1(i) < 0.0;
                    if (!(sign_change || (zero0 || zero1))) {
                        cand = false;
                        break;
                    }
                    if (sign_change && std::abs(d0(i) - d1(i)) > pivot_span) {
                        pivot_span = std::abs(d0(i) - d1(i));
                        pivot_axis = i;
                    }
                }
                if (!cand) continue;
                // skip fibers inside detected overlaps
                bool inside_overlap = false;
                for (const auto& ev : d.events)
                    if (ev.kind == BranchEvent::Kind::Overlap &&
                        ev.tracks.size() == 2 && ev.tracks[0] == ta.id &&
                        ev.tracks[1] == tb.id && d.grid[f] >= ev.x - 1e-15 &&
                        d.grid[f] <= ev.x_end + 1e-15)
                        inside_overlap = true;
                if (inside_overlap) continue;

                double xa = d.grid[f], xb = d.grid[f + 1];
                double xr;
                if (pivot_axis < 0) {
                    // both endpoints already coincident: take the closer one
                    xr = (ta.at_fiber(f).lambda - tb.at_fiber(f).lambda)
                                     .lpNorm<Eigen::Infinity>() <
                                 (ta.at_fiber(f + 1).lambda -
                                  tb.at_fiber(f + 1).lambda)
                                     .lpNorm<Eigen::Infinity>()
                             ? xa
                             : xb;
                } else {
                    // bisection on the pivot component
                    RVec ref_a = ta.at_fiber(f).lambda;
                    RVec ref_b = tb.at_fiber(f).lambda;
                    double fa = d0(pivot_axis);
                    for (int it = 0; it < 60 && (xb - xa) > 1e-7; ++it) {
                        double xm = 0.5 * (xa + xb);
                        FiberData fm = analyze_fiber(map, xm);
                        auto [pa, pb] = match_pair(fm, ref_a, ref_b);
                        double fm_val = pa(pivot_axis) - pb(pivot_axis);
                        if (fa * fm_val <= 0.0) {
                            xb = xm;
                        } else {
                            xa = xm;
                            fa = fm_val;
                            ref_a = pa;
                            ref_b = pb;
                        }
                    }
                    xr = 0.5 * (xa + xb);
                    // confirm all components meet at the root
                    FiberData fr = analyze_fiber(map, xr);
                    auto [pa, pb] = match_pair(fr, ta.at_fiber(f).lambda,
                                               tb.at_fiber(f).lambda);
                    if ((pa - pb).lpNorm<Eigen::Infinity>() >
                        std::max(match_tol, 1e-5 * scale))
                        continue;
                }
                // deduplicate
                bool dup = false;
                for (const auto& ev : d.events)
                    if (ev.kind == BranchEvent::Kind::Crossing &&
                        std::abs(ev.x - xr) < 1e-5 && ev.tracks.size() == 2 &&
                        ev.tracks[0] == ta.id && ev.tracks[1] == tb.id)
                        dup = true;
                if (dup) continue;
                BranchEvent ev;
                ev.kind = BranchEvent::Kind::Crossing;
                ev.x = xr;
                ev.tracks = {ta.id, tb.id};
                d.events.push_back(std::move(ev));
            }
        }
    }
    std::sort(d.events.begin(), d.events.end(),
              [](const BranchEvent& a, const BranchEvent& b) { return a.x < b.x; });

    // ---- components: tracks joined by overlaps ----
    std::vector<int> parent(d.tracks.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& ev : d.events)
        if (ev.kind == BranchEvent::Kind::Overlap && ev.tracks.size() == 2)
            parent[find(ev.tracks[0])] = find(ev.tracks[1]);
    std::map<int, std::vector<int>> groups;
    for (size_t t = 0; t < d.tracks.size(); ++t)
        groups[find(static_cast<int>(t))].push_back(static_cast<int>(t));
    for (auto& [root, members] : groups) d.components.push_back(members);

    return d;
}

// ---------------------------------------------------------------------------
// Characteristic polynomials via Faddeev-LeVerrier over polynomial matrices.
// ---------------------------------------------------------------------------
namespace {

class CPolyMatX {
public:
    CPolyMatX(int r) : r_(r), a_(r * r) {}
    static CPolyMatX identity(int r) {
        CPolyMatX m(r);
        for (int i = 0; i < r; ++i) m(i, i) = CPoly::constant(1.0);
        return m;
    }
    CPoly& operator()(int i, int j) { return a_[i * r_ + j]; }
    const CPoly& operator()(int i, int j) const { return a_[i * r_ + j]; }
    CPolyMatX mul(const CPolyMatX& o) const {
        CPolyMatX m(r_);
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < r_; ++k) {
                if ((*this)(i, k).zero()) continue;
                for (int j = 0; j < r_; ++j)
                    m(i, j) = m(i, j) + (*this)(i, k) * o(k, j);
            }
        return m;
    }
    CPolyMatX add_scalar(const CPoly& s) const {
        CPolyMatX m = *this;
        for (int i = 0; i < r_; ++i) m(i, i) = m(i, i) + s;
        return m;
    }
    CPoly trace() const {
        CPoly t;
        for (int i = 0; i < r_; ++i) t = t + (*this)(i, i);
        return t;
    }

private:
    int r_;
    std::vector<CPoly> a_;
};

}  // namespace

std::vector<Poly2> characteristic_polynomials(const MatrixCurveMap& map) {
    if (!map.polynomial_entries())
        throw DomainError("characteristic polynomials require polynomial entries");
    std::vector<Poly2> out;
    for (int axis = 0; axis < map.n; ++axis) {
        CPolyMatX a(map.r);
        for (int i = 0; i < map.r; ++i)
            for (int j = 0; j < map.r; ++j) a(i, j) = map.ms[axis](i, j).poly();
        // c[k] coefficient of y^k, via the Faddeev-LeVerrier recurrence
        std::vector<CPoly> c(map.r + 1);
        c[map.r] = CPoly::constant(1.0);
        CPolyMatX m_prev = CPolyMatX::identity(map.r);  // M_1 = I
        for (int k = 1; k <= map.r; ++k) {
            if (k > 1) m_prev = a.mul(m_prev).add_scalar(c[map.r - k + 1]);
            CPoly tr = a.mul(m_prev).trace();
            c[map.r - k] = tr * Cplx(-1.0 / double(k), 0.0);
        }
        // assemble p(x, y) = sum_k c_k(x) y^k, coefficients must be real
        double worst_imag = 0.0, worst_coeff = 1.0;
        for (const auto& p : c) {
            worst_imag = std::max(worst_imag, p.max_imag());
            for (const auto& v : p.coeffs())
                worst_coeff = std::max(worst_coeff, std::abs(v));
        }
        if (worst_imag > 1e-8 * worst_coeff)
            throw NonRealSpectrum(
                "characteristic polynomial has non-real coefficients");
        std::vector<std::vector<double>> table;  // [x power][y power]
        int max_xdeg = 0;
        for (const auto& p : c) max_xdeg = std::max(max_xdeg, p.degree());
        table.assign(max_xdeg + 1, std::vector<double>(map.r + 1, 0.0));
        for (int k = 0; k <= map.r; ++k)
            for (int e = 0; e <= c[k].degree(); ++e)
                table[e][k] = c[k].coeff(e).real();
        out.emplace_back(std::move(table));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification of a branch diagram.
// ---------------------------------------------------------------------------
Classification classify(const BranchDiagram& d) {
    Classification c;
    bool structure_change = false;
    for (const auto& ev : d.events) {
        if (ev.kind == BranchEvent::Kind::Crossing) c.crossings = true;
        if (ev.kind == BranchEvent::Kind::Overlap) c.overlaps = true;
        if (ev.kind == BranchEvent::Kind::StructureChange) structure_change = true;
    }
    int free_multi = 0;
    int max_mult = 0;
    for (const auto& t : d.tracks) {
        const int cloud = t.max_nilp_order() - 1;
        max_mult = std::max(max_mult, t.mult());
        if (t.mult() == 1) {
            ++c.simple_tracks;
        } else if (cloud == 0) {
            ++free_multi;
        } else {
            ++c.nilpotent_tracks;
        }
        c.max_cloud_order = std::max(c.max_cloud_order, cloud);
    }
    if (structure_change) {
        c.label = "general";
    } else if (c.nilpotent_tracks == 0 && free_multi == 0) {
        c.label = "all-simple";
    } else if (d.tracks.size() == 1 && free_multi == 1) {
        c.label = "free-rank-" + std::to_string(max_mult);
    } else if (d.tracks.size() == 1 && c.nilpotent_tracks == 1) {
        c.label = "single-nilpotent-order-" + std::to_string(c.max_cloud_order);
    } else if (c.simple_tracks > 0 && c.nilpotent_tracks > 0 && free_multi == 0) {
        c.label =
            "mixed-simple-nilpotent(order " + std::to_string(c.max_cloud_order) + ")";
    } else {
        c.label = "general";
    }
    // per-interval labels between consecutive events
    std::vector<double> cuts = {d.x0};
    for (const auto& ev : d.events)
        if (ev.kind == BranchEvent::Kind::Crossing) cuts.push_back(ev.x);
    cuts.push_back(d.x1);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        int simple = 0, nilp = 0;
        for (const auto& t : d.tracks) {
            // track sample nearest to mid
            if (t.samples.empty()) continue;
            if (mid < t.samples.front().x || mid > t.samples.back().x) continue;
            if (t.mult() == 1)
                ++simple;
            else
                ++nilp;
        }
        c.interval_labels.push_back(
            "[" + std::to_string(cuts[i]) + "," + std::to_string(cuts[i + 1]) +
            "]: " + std::to_string(simple) + " simple, " + std::to_string(nilp) +
            " multiple");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Branched covers.
// ---------------------------------------------------------------------------
MatrixCurveMap from_branched_cover(const CoverSpec& spec) {
    const int d = static_cast<int>(spec.branch_functions.size());
    if (d == 0) throw DomainError("no branch functions");
    const int n = static_cast<int>(spec.branch_functions[0].size());
    if (static_cast<int>(spec.monodromy.size()) != d)
        throw MonodromyMismatch("monodromy permutation size does not match cover degree");
    // validate the permutation
    std::vector<bool> seen(d, false);
    for (int v : spec.monodromy) {
        if (v < 0 || v >= d || seen[v])
            throw MonodromyMismatch("monodromy is not a permutation");
        seen[v] = true;
    }
    bool identity = true;
    for (int i = 0; i < d; ++i)
        if (spec.monodromy[i] != i) identity = false;
    if (!spec.circle && !identity)
        throw MonodromyMismatch("interval base requires identity monodromy");

    // cycles of the permutation
    std::vector<std::vector<int>> cycles;
    std::vector<bool> used(d, false);
    for (int i = 0; i < d; ++i) {
        if (used[i]) continue;
        std::vector<int> cyc;
        int v = i;
        while (!used[v]) {
            used[v] = true;
            cyc.push_back(v);
            v = spec.monodromy[v];
        }
        cycles.push_back(std::move(cyc));
    }

    MatrixCurveMap map;
    map.circle = spec.circle;
    map.x0 = spec.x0;
    map.x1 = spec.x1;
    map.n = n;
    map.k = spec.k;
    map.tol = spec.tol;
    map.r = d;
    for (int axis = 0; axis < n; ++axis) map.ms.emplace_back(d, d);

    int offset = 0;
    for (const auto& cyc : cycles) {
        const int c = static_cast<int>(cyc.size());
        // companion matrix of w with w^c = x, in the basis 1, w, ..., w^{c-1}
        std::vector<std::vector<Poly>> w_pow;  // powers of the companion
        // build as polynomial matrices over the base coordinate
        auto zero_mat = [&]() {
            return std::vector<std::vector<Poly>>(
                c, std::vector<Poly>(c, Poly()));
        };
        auto companion = zero_mat();
        for (int i = 0; i + 1 < c; ++i) companion[i + 1][i] = Poly::constant(1.0);
        if (c > 1) companion[0][c - 1] = Poly::x();
        else companion[0][0] = Poly::x();
        // careful: for c == 1 the single sheet multiplies by the base
        // coordinate itself only when the branch polynomial says so; start
        // from the identity powers below
        auto mat_mul = [&](const std::vector<std::vector<Poly>>& a,
                           const std::vector<std::vector<Poly>>& b) {
            auto m = zero_mat();
            for (int i = 0; i < c; ++i)
                for (int k2 = 0; k2 < c; ++k2)
                    for (int j = 0; j < c; ++j)
                        m[i][j] = m[i][j] + a[i][k2] * b[k2][j];
            return m;
        };
        auto ident = zero_mat();
        for (int i = 0; i < c; ++i) ident[i][i] = Poly::constant(1.0);

        for (int axis = 0; axis < n; ++axis) {
            const Poly& f = spec.branch_functions[cyc.front()][axis];
            // f(w) evaluated on the companion matrix of w
            auto acc = zero_mat();
            auto pw = ident;
            for (int deg = 0; deg <= f.degree(); ++deg) {
                const double coeff = f.coeff(deg);
                if (coeff != 0.0)
                    for (int i = 0; i < c; ++i)
                        for (int j = 0; j < c; ++j)
                            acc[i][j] = acc[i][j] + pw[i][j] * coeff;
                if (deg < f.degree()) {
                    if (c == 1) {
                        // cover coordinate equals the base coordinate
                        for (auto& row : pw)
                            for (auto& p : row) p = p * Poly::x();
                    } else {
                        pw = mat_mul(companion, pw);
                    }
                }
            }
            for (int i = 0; i < c; ++i)
                for (int j = 0; j < c; ++j)
                    map.ms[axis](offset + i, offset + j) = CurveEntry(acc[i][j]);
        }
        offset += c;
    }
    return map;
}

// ---------------------------------------------------------------------------
// Push-forward connection.
// ---------------------------------------------------------------------------
namespace {

// Filtration-adapted orthonormal frame of a block: columns spanning the
// deepest radical power first, each layer completed orthonormally.
Mat filtration_frame(const std::vector<Mat>& nilpotents, int s, double theta) {
    std::vector<Mat> layers;  // orthonormal bases of I^j V, j = 1, 2, ...
    std::vector<Mat> frontier = {Mat::Identity(s, s)};
    for (int j = 1; j <= s; ++j) {
        std::vector<Mat> next;
        for (const auto& w : frontier)
            for (const auto& nmat : nilpotents) next.push_back(nmat * w);
        if (next.empty()) break;
        Mat stacked(s, static_cast<int>(next.size()) * s);
        for (size_t t = 0; t < next.size(); ++t)
            stacked.middleCols(static_cast<int>(t) * s, s) = next[t];
        Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinU);
        int rank = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > theta) ++rank;
        if (rank == 0) break;
        layers.push_back(svd.matrixU().leftCols(rank));
        frontier = {layers.back()};
    }
    // frame: deepest layer first, then complete each shallower layer, then V
    Mat frame(s, s);
    int col = 0;
    Mat have(s, 0);
    for (int j = static_cast<int>(layers.size()) - 1; j >= -1; --j) {
        Mat target = j >= 0 ? layers[j] : Mat(Mat::Identity(s, s));
        // project out what we already have, orthonormalize the rest
        for (int t = 0; t < target.cols(); ++t) {
            Eigen::VectorXcd v = target.col(t);
            if (have.cols() > 0) v -= have * (have.adjoint() * v);
            if (col > 0)
                v -= frame.leftCols(col) * (frame.leftCols(col).adjoint() * v);
            const double nn = v.norm();
            if (nn < 1e-10) continue;
            frame.col(col) = v / nn;
            ++col;
            if (col == s) break;
        }
        if (col == s) break;
    }
    if (col != s) throw SingularBasis("filtration frame incomplete");
    return frame;
}

// Unitary alignment of frame columns to the previous fiber's frame, layer by
// layer (orthogonal Procrustes within each filtration layer).
Mat align_frame(const Mat& prev, const Mat& cur, const std::vector<int>& layer_dims) {
    Mat aligned = cur;
    int start = 0;
    for (int dim : layer_dims) {
        Mat p = prev.middleCols(start, dim);
        Mat c = cur.middleCols(start, dim);
        Mat m = c.adjoint() * p;
        Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Mat rot = svd.matrixU() * svd.matrixV().adjoint();
        aligned.middleCols(start, dim) = c * rot;
        start += dim;
    }
    return aligned;
}

}  // namespace

BranchConnection pushforward_connection(const MatrixCurveMap& map,
                                        const CPolyMat& a,
                                        const BranchDiagram& d) {
    BranchConnection bc;
    const int g = static_cast<int>(d.grid.size());
    const double h = (d.x1 - d.x0) / double(g - 1);
    const double scale = map_scale(map, d.grid);

    // refined crossing locations enter the singular locus
    for (const auto& ev : d.events)
        if (ev.kind == BranchEvent::Kind::Crossing)
            bc.singular_locus.push_back(ev.x);

    std::vector<FiberData> fibers = analyze_fibers_parallel(map, d.grid);

    for (const auto& t : d.tracks) {
        if (t.first_fiber != 0 || t.last_fiber() != g - 1)
            throw HypothesesNotMet(
                t.id, "track does not persist over the whole base");
        if (t.mult() == 1) {
            // eigenline: normalized eigenvector frame, coefficient
            // row_t(P^-1) (P' + a P) col_t
            SimpleTrackConnection sc;
            sc.track_id = t.id;
            sc.coefficient.assign(g, Cplx(0.0));
            // normalized eigenvector per fiber (pivot from the first regular fiber)
            std::vector<Eigen::VectorXcd> cols(g);
            std::vector<char> singular(g, 0);
            int pivot = -1;
            for (int j = 0; j < g; ++j) {
                const auto& s = t.samples[j];
                const FiberData& f = fibers[j];
                if (s.block_length != s.mult) {
                    singular[j] = 1;  // crossing fiber: frame degenerate
                    continue;
                }
                Eigen::VectorXcd v =
                    f.basis_change.col(f.offsets[s.block_index]);
                if (pivot < 0) {
                    for (int i = 0; i < v.size(); ++i)
                        if (std::abs(v(i)) > 1e-9 * v.lpNorm<Eigen::Infinity>()) {
                            pivot = i;
                            break;
                        }
                }
                if (std::abs(v(pivot)) < 1e-12 * v.lpNorm<Eigen::Infinity>()) {
                    singular[j] = 1;
                    continue;
                }
                cols[j] = v / v(pivot);
            }
            // full frame per fiber for the dual rows
            for (int j = 0; j < g; ++j) {
                if (singular[j]) {
                    sc.coefficient[j] =
                        Cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
                    continue;
                }
                const int jm = j > 0 && !singular[j - 1] ? j - 1 : j;
                const int jp = j < g - 1 && !singular[j + 1] ? j + 1 : j;
                if (jm == jp) {
                    sc.coefficient[j] =
                        Cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
                    continue;
                }
                Eigen::VectorXcd dcol =
                    (cols[jp] - cols[jm]) / (d.grid[jp] - d.grid[jm]);
                // dual row of the frame: w with P^T w = e_t, so that
                // w^T v is the t-th coefficient of v in the frame
                const FiberData& f = fibers[j];
                Mat p = f.basis_change;
                // replace this track's column by its normalized version
                const auto& s = t.samples[j];
                p.col(f.offsets[s.block_index]) = cols[j];
                Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(map.r);
                rhs(f.offsets[s.block_index]) = 1.0;
                Eigen::VectorXcd dual =
                    Mat(p.transpose()).partialPivLu().solve(rhs);
                const Mat amat = a.rows() == map.r
                                     ? a.eval(d.grid[j])
                                     : Mat(Mat::Zero(map.r, map.r));
                sc.coefficient[j] =
                    (dual.transpose() * (dcol + amat * cols[j]))(0);
            }
            bc.simple.push_back(std::move(sc));
        } else {
            // filtered track: connection matrix in the filtration frame
            if (t.samples.front().filtration.size() != t.samples.back().filtration.size())
                throw HypothesesNotMet(t.id, "multiplicity profile changes inside track");
            for (const auto& s : t.samples)
                if (s.block_length != t.mult())
                    throw HypothesesNotMet(t.id,
                                           "branch multiplicity jumps inside component");
            FilteredTrackConnection fc;
            fc.track_id = t.id;
            const int s_dim = t.mult();
            const double theta = 10.0 * map.tol * scale;
            // per-fiber frames, aligned
            std::vector<Mat> frames(g);
            std::vector<int> layer_dims;
            {
                const auto& filt = t.samples.front().filtration;
                int prev = 0;
                for (int dim : filt) {
                    layer_dims.push_back(dim - prev);
                    prev = dim;
                }
            }
            Mat pinv_prev;
            for (int j = 0; j < g; ++j) {
                const auto& s = t.samples[j];
                const FiberData& f = fibers[j];
                Mat block_basis = f.basis_change.middleCols(
                    f.offsets[s.block_index], s.block_length);
                // nilpotent generators in the block basis
                Mat p_inv = f.basis_change.partialPivLu().solve(
                    Mat::Identity(map.r, map.r));
                std::vector<Mat> nil;
                auto mats = map.fiber(d.grid[j]);
                for (int i = 0; i < map.n; ++i) {
                    Mat rest = p_inv.middleRows(f.offsets[s.block_index],
                                                s.block_length) *
                               mats[i] * block_basis;
                    nil.push_back(rest - s.lambda(i) * Mat::Identity(s_dim, s_dim));
                }
                Mat local = filtration_frame(nil, s_dim, theta);
                Mat ambient = block_basis * local;
                if (j > 0) ambient = align_frame(frames[j - 1], ambient, layer_dims);
                frames[j] = ambient;
            }
            fc.matrices.assign(g, Mat::Zero(s_dim, s_dim));
            double worst = 0.0;
            for (int j = 0; j < g; ++j) {
                const int jm = std::max(0, j - 1);
                const int jp = std::min(g - 1, j + 1);
                Mat dq = (frames[jp] - frames[jm]) / (d.grid[jp] - d.grid[jm]);
                const Mat amat = a.rows() == map.r ? a.eval(d.grid[j])
                                                   : Mat(Mat::Zero(map.r, map.r));
                Mat q = frames[j];
                Mat omega = (q.adjoint() * q).partialPivLu().solve(
                    q.adjoint() * (dq + amat * q));
                fc.matrices[j] = omega;
                // filtration invariance: rows past each level, columns within
                int level = 0;
                for (size_t li = 0; li + 1 < layer_dims.size(); ++li) {
                    level += layer_dims[li];
                    worst = std::max(
                        worst,
                        omega.block(level, 0, s_dim - level, level).cwiseAbs().maxCoeff());
                }
            }
            fc.filtration_residual = worst;
            bc.filtered.push_back(std::move(fc));
        }
    }
    std::sort(bc.singular_locus.begin(), bc.singular_locus.end());
    bc.singular_locus.erase(
        std::unique(bc.singular_locus.begin(), bc.singular_locus.end(),
                    [](double a2, double b2) { return std::abs(a2 - b2) < 1e-9; }),
        bc.singular_locus.end());
    return bc;
}

// ---------------------------------------------------------------------------
// Families.
// ---------------------------------------------------------------------------
MatrixCurveMap evaluate_family(const FamilySpec& spec, double t) {
    if (t < spec.t0 - 1e-12 || t > spec.t1 + 1e-12)
        throw OutOfRange("family parameter " + std::to_string(t) +
                         " outside [" + std::to_string(spec.t0) + ", " +
                         std::to_string(spec.t1) + "]");
    MatrixCurveMap map;
    map.circle = spec.circle;
    map.x0 = spec.x0;
    map.x1 = spec.x1;
    map.r = spec.r;
    map.n = spec.n;
    map.k = spec.k;
    map.tol = spec.tol;
    map.name = spec.name;
    for (int axis = 0; axis < spec.n; ++axis) {
        EntryMat m(spec.r, spec.r);
        for (int i = 0; i < spec.r; ++i)
            for (int j = 0; j < spec.r; ++j)
                m(i, j) = CurveEntry(spec.ms[axis][i * spec.r + j].at_var2(t));
        map.ms.push_back(std::move(m));
    }
    return map;
}

}  // namespace az
