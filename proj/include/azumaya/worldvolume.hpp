#pragma once

#include <string>
#include <vector>

#include "azumaya/dga.hpp"
#include "azumaya/point_map.hpp"
#include "azumaya/poly.hpp"

namespace az {

/// Entry of a matrix-valued function of the base variable: a complex
/// polynomial, or a trigonometric polynomial on a circle base.
class CurveEntry {
public:
    CurveEntry() : trig_(false) {}
    CurveEntry(CPoly p) : trig_(false), poly_(std::move(p)) {}
    CurveEntry(Poly p) : trig_(false), poly_(CPoly(p)) {}
    CurveEntry(TrigPoly t) : trig_(true), trig_poly_(std::move(t)) {}

    bool is_trig() const { return trig_; }
    const CPoly& poly() const {
        if (trig_) throw DomainError("entry is trigonometric");
        return poly_;
    }
    const TrigPoly& trig_poly() const { return trig_poly_; }
    Cplx eval(double x) const {
        return trig_ ? Cplx(trig_poly_.eval(x), 0.0) : poly_.eval(x);
    }

private:
    bool trig_;
    CPoly poly_;
    TrigPoly trig_poly_;
};

class EntryMat {
public:
    EntryMat() : rows_(0), cols_(0) {}
    EntryMat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    CurveEntry& operator()(int i, int j) { return a_[i * cols_ + j]; }
    const CurveEntry& operator()(int i, int j) const { return a_[i * cols_ + j]; }
    Mat eval(double x) const {
        Mat m(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(x);
        return m;
    }
    bool polynomial() const {
        for (const auto& e : a_)
            if (e.is_trig()) return false;
        return true;
    }

private:
    int rows_, cols_;
    std::vector<CurveEntry> a_;
};

/// A map from a 1-dimensional world-volume with trivialized rank-r module
/// to R^n, given fiberwise by the coordinate images m^i(x).
struct MatrixCurveMap {
    bool circle = false;
    double x0 = 0.0, x1 = 1.0;
    int r = 0, n = 0;
    std::vector<EntryMat> ms;
    Smoothness k = Smoothness::infinite();
    double tol = 1e-6;
    std::string name;

    bool polynomial_entries() const {
        for (const auto& m : ms)
            if (!m.polynomial()) return false;
        return true;
    }
    std::vector<Mat> fiber(double x) const {
        std::vector<Mat> f;
        f.reserve(ms.size());
        for (const auto& m : ms) f.push_back(m.eval(x));
        return f;
    }
    AzumayaPointMap point_at(double x) const {
        return AzumayaPointMap{r, n, fiber(x), k, tol};
    }
};

/// Per-fiber joint decomposition data.
struct FiberData {
    std::vector<RVec> points;
    std::vector<int> lengths;
    std::vector<std::vector<int>> nilp_orders;  // per block, per axis
    std::vector<std::vector<int>> filtrations;  // per block
    Mat basis_change;
    std::vector<int> offsets;
};

FiberData analyze_fiber(const MatrixCurveMap& map, double x);

/// Serial reference implementation of the fiber sweep.
std::vector<FiberData> analyze_fibers_serial(const MatrixCurveMap& map,
                                             const std::vector<double>& xs);

/// OpenMP implementation; identical results for any thread count.
std::vector<FiberData> analyze_fibers_parallel(const MatrixCurveMap& map,
                                               const std::vector<double>& xs,
                                               int threads = 0);

struct TrackSample {
    double x = 0.0;
    RVec lambda;
    int mult = 0;          // multiplicity carried by the track
    int block_length = 0;  // length of the block it sits on at this fiber
    int block_index = -1;
    int nilp_order = 1;    // max over axes
    std::vector<int> nilp_orders;
    std::vector<int> filtration;
};

struct Track {
    int id = 0;
    int first_fiber = 0;
    std::vector<TrackSample> samples;

    int mult() const { return samples.empty() ? 0 : samples.front().mult; }
    bool simple() const { return mult() == 1; }
    int last_fiber() const {
        return first_fiber + static_cast<int>(samples.size()) - 1;
    }
    bool alive_at(int fiber) const {
        return fiber >= first_fiber && fiber <= last_fiber();
    }
    const TrackSample& at_fiber(int fiber) const {
        return samples[fiber - first_fiber];
    }
    int max_nilp_order() const {
        int p = 1;
        for (const auto& s : samples) p = std::max(p, s.nilp_order);
        return p;
    }
};

struct BranchEvent {
    enum class Kind { Crossing, Overlap, StructureChange };
    Kind kind = Kind::Crossing;
    double x = 0.0;
    double x_end = 0.0;  // for overlaps
    std::vector<int> tracks;
};

struct BranchDiagram {
    double x0 = 0.0, x1 = 0.0;
    bool circle = false;
    int r = 0, n = 0;
    double tol = 1e-6;
    std::vector<double> grid;
    std::vector<Track> tracks;
    std::vector<BranchEvent> events;
    std::vector<std::vector<int>> components;
    std::vector<double> ambiguous_matches;  // x locations of tie-broken matches
};

BranchDiagram analyze(const MatrixCurveMap& map, int grid_size = 512,
                      int threads = 0);

/// Exact bivariate characteristic polynomials det(y Id - m^i(x)), monic of
/// degree r in y; requires polynomial entries.
std::vector<Poly2> characteristic_polynomials(const MatrixCurveMap& map);

struct Classification {
    std::string label;
    bool crossings = false;
    bool overlaps = false;
    int simple_tracks = 0;
    int nilpotent_tracks = 0;
    int max_cloud_order = 0;  // nilpotency index - 1
    std::vector<std::string> interval_labels;
};

Classification classify(const BranchDiagram& d);

/// Branched-cover input: one function tuple per sheet; on a circle base the
/// monodromy permutation glues sheets into cyclic cover components whose
/// representative tuple is read as a polynomial in the cover coordinate w
/// with w^c = x.
struct CoverSpec {
    std::vector<std::vector<Poly>> branch_functions;
    std::vector<int> monodromy;
    bool circle = false;
    double x0 = 0.0, x1 = 1.0;
    Smoothness k = Smoothness::infinite();
    double tol = 1e-6;
};

MatrixCurveMap from_branched_cover(const CoverSpec& spec);

struct SimpleTrackConnection {
    int track_id = 0;
    std::vector<Cplx> coefficient;  // per grid point; NaN at singular fibers
};

struct FilteredTrackConnection {
    int track_id = 0;
    std::vector<Mat> matrices;  // per grid point, in the filtration frame
    double filtration_residual = 0.0;
};

struct BranchConnection {
    std::vector<SimpleTrackConnection> simple;
    std::vector<FilteredTrackConnection> filtered;
    std::vector<double> singular_locus;
};

/// Push-forward of the connection d + a(x) dx along the diagram's tracks.
BranchConnection pushforward_connection(const MatrixCurveMap& map,
                                        const CPolyMat& a,
                                        const BranchDiagram& d);

struct FamilySpec {
    std::string name;
    double t0 = 0.0, t1 = 1.0;
    bool circle = false;
    double x0 = 0.0, x1 = 1.0;
    int r = 0, n = 0;
    std::vector<std::vector<Poly2>> ms;  // per axis, r*r row-major entries in (x, t)
    Smoothness k = Smoothness::infinite();
    double tol = 1e-6;
};

MatrixCurveMap evaluate_family(const FamilySpec& spec, double t);

// ---------------------------------------------------------------------------
// Planar-base maps (two real base variables) for holomorphicity checks.
// ---------------------------------------------------------------------------
struct PlanarMatrixMap {
    int r = 0, n = 0;  // n must be even
    std::vector<std::vector<Poly2>> ms;  // per axis, r*r row-major entries in (u, v)
    double tol = 1e-6;

    std::vector<Mat> fiber(double u, double v) const {
        std::vector<Mat> f;
        for (const auto& entries : ms) {
            Mat m(r, r);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    m(i, j) = Cplx(entries[i * r + j].eval(u, v), 0.0);
            f.push_back(std::move(m));
        }
        return f;
    }
};

}  // namespace az
