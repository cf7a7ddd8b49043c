#include "azumaya/fixtures.hpp"

namespace az {

namespace {

Mat lower_jordan(int size, double lambda) {
    Mat j = lambda * Mat::Identity(size, size);
    for (int i = 0; i + 1 < size; ++i) j(i + 1, i) = 1.0;
    return j;
}

Mat block_diag(const std::vector<Mat>& blocks) {
    int r = 0;
    for (const auto& b : blocks) r += static_cast<int>(b.rows());
    Mat m = Mat::Zero(r, r);
    int off = 0;
    for (const auto& b : blocks) {
        m.block(off, off, b.rows(), b.cols()) = b;
        off += static_cast<int>(b.rows());
    }
    return m;
}

EntryMat diag_entries(const std::vector<Poly>& ps) {
    const int r = static_cast<int>(ps.size());
    EntryMat m(r, r);
    for (int i = 0; i < r; ++i) m(i, i) = CurveEntry(ps[i]);
    return m;
}

// t * x, t, x, 1 as bivariate coefficients
using Table = std::vector<std::vector<double>>;
Poly2 p2_tx(double c) { return Poly2(Table{{0.0, 0.0}, {0.0, c}}); }
Poly2 p2_t(double c) { return Poly2(Table{{0.0, c}}); }
Poly2 p2_x(double c) { return Poly2(Table{{0.0}, {c}}); }
Poly2 p2_const(double c) { return Poly2(Table{{c}}); }

FamilySpec slag_family(const std::string& name, bool lower1_is_one,
                       bool lower2_is_one) {
    FamilySpec f;
    f.name = name;
    f.t0 = 0.0;
    f.t1 = 1.0;
    f.x0 = -2.0;
    f.x1 = 2.0;
    f.r = 3;
    f.n = 2;
    f.k = Smoothness::infinite();
    f.tol = 2e-4;
    // first coordinate: x Id
    std::vector<Poly2> m1(9, Poly2());
    m1[0] = p2_x(1.0);
    m1[4] = p2_x(1.0);
    m1[8] = p2_x(1.0);
    // second coordinate: [[-t x, 0, 0], [s1, t, 0], [0, s2, t x]]
    std::vector<Poly2> m2(9, Poly2());
    m2[0] = p2_tx(-1.0);
    m2[3] = lower1_is_one ? p2_const(1.0) : p2_t(1.0);
    m2[4] = p2_t(1.0);
    m2[7] = lower2_is_one ? p2_const(1.0) : p2_t(1.0);
    m2[8] = p2_tx(1.0);
    f.ms = {std::move(m1), std::move(m2)};
    return f;
}

}  // namespace

std::optional<AzumayaPointMap> builtin_point_map(const std::string& name) {
    if (name == "example-3.1.1") {
        AzumayaPointMap m;
        m.r = 5;
        m.n = 1;
        m.k = Smoothness::infinite();
        m.tol = 1e-6;
        m.ms = {block_diag(
            {lower_jordan(2, 1.0), lower_jordan(1, 1.0), lower_jordan(2, 2.0)})};
        return m;
    }
    if (name == "example-rotation") {
        AzumayaPointMap m;
        m.r = 2;
        m.n = 1;
        m.k = Smoothness::infinite();
        m.tol = kDefaultTol;
        Mat rot(2, 2);
        rot << 0.0, -1.0, 1.0, 0.0;
        m.ms = {rot};
        return m;
    }
    return std::nullopt;
}

std::optional<MatrixCurveMap> builtin_curve_map(const std::string& name) {
    const Poly f1({0.0, -1.0, 0.0, 1.0});  // x^3 - x
    const Poly g1({-1.0, 0.0, 1.0});       // x^2 - 1
    if (name == "example-5.2.6.a") {
        // three diagonal sections, crossing pairwise at x = 0.5 and x = -0.8
        Poly f2 = f1 + Poly({-0.35, 0.7});
        Poly f3 = f1 + Poly({0.4, 0.5});
        Poly g2 = g1 + Poly({0.2, -0.4});
        Poly g3 = g1 + Poly({0.24, 0.3});
        MatrixCurveMap m;
        m.x0 = -1.5;
        m.x1 = 1.5;
        m.r = 3;
        m.n = 2;
        m.k = Smoothness::infinite();
        m.tol = 1e-6;
        m.name = name;
        m.ms = {diag_entries({f1, f2, f3}), diag_entries({g1, g2, g3})};
        return m;
    }
    if (name == "example-5.2.6.b") {
        const Poly f2({0.3, 1.0});
        const Poly g2({-0.2, 0.5});
        MatrixCurveMap m;
        m.x0 = -1.5;
        m.x1 = 1.5;
        m.r = 3;
        m.n = 2;
        m.k = Smoothness::infinite();
        m.tol = 1e-6;
        m.name = name;
        EntryMat m1(3, 3), m2(3, 3);
        m1(0, 0) = CurveEntry(f1);
        m1(1, 1) = CurveEntry(f2);
        m1(2, 2) = CurveEntry(f2);
        m1(2, 1) = CurveEntry(Poly::constant(1.0));
        m2(0, 0) = CurveEntry(g1);
        m2(1, 1) = CurveEntry(g2);
        m2(2, 2) = CurveEntry(g2);
        m.ms = {std::move(m1), std::move(m2)};
        return m;
    }
    if (name == "example-5.2.6.c") {
        MatrixCurveMap m;
        m.x0 = -1.5;
        m.x1 = 1.5;
        m.r = 3;
        m.n = 2;
        m.k = Smoothness::infinite();
        m.tol = 2e-4;
        m.name = name;
        EntryMat m1(3, 3), m2(3, 3);
        for (int i = 0; i < 3; ++i) {
            m1(i, i) = CurveEntry(f1);
            m2(i, i) = CurveEntry(g1);
        }
        m1(1, 0) = CurveEntry(Poly::constant(1.0));
        m1(2, 1) = CurveEntry(Poly::constant(1.0));
        m.ms = {std::move(m1), std::move(m2)};
        return m;
    }
    if (name == "example-cover-sqrt") {
        CoverSpec spec;
        spec.branch_functions = {{Poly::x()}, {Poly::x()}};
        spec.monodromy = {1, 0};
        spec.circle = true;
        spec.x0 = 0.0;
        spec.x1 = 1.0;
        spec.k = Smoothness::infinite();
        spec.tol = 1e-6;
        MatrixCurveMap m = from_branched_cover(spec);
        m.name = name;
        return m;
    }
    if (name.rfind("example-7.2.2-phi", 0) == 0) {
        auto fam = builtin_family(name);
        if (!fam) return std::nullopt;
        MatrixCurveMap m = evaluate_family(*fam, 1.0);
        m.name = name;
        return m;
    }
    return std::nullopt;
}

std::optional<FamilySpec> builtin_family(const std::string& name) {
    std::string key = name;
    if (key.rfind("example-", 0) == 0) key = key.substr(8);
    if (key == "7.2.2-phi1") return slag_family("example-7.2.2-phi1", false, false);
    if (key == "7.2.2-phi2") return slag_family("example-7.2.2-phi2", false, true);
    if (key == "7.2.2-phi3") return slag_family("example-7.2.2-phi3", true, false);
    if (key == "7.2.2-phi4") return slag_family("example-7.2.2-phi4", true, true);
    return std::nullopt;
}

std::vector<std::string> builtin_names() {
    return {"example-3.1.1",        "example-rotation",
            "example-5.2.6.a",      "example-5.2.6.b",
            "example-5.2.6.c",      "example-cover-sqrt",
            "example-7.2.2-phi1",   "example-7.2.2-phi2",
            "example-7.2.2-phi3",   "example-7.2.2-phi4"};
}

}  // namespace az
