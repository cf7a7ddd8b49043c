#pragma once

#include <vector>

#include "azumaya/point_map.hpp"
#include "azumaya/rational.hpp"

namespace az {

/// Inner derivation b -> [a, b] of the rank-r matrix algebra, with the
/// generator stored trace-free. All derivations over the center are of this
/// form, so this type covers the full derivation space.
struct Derivation {
    RatMat generator;  // trace-free

    int rank() const { return generator.rows(); }
    RatMat apply(const RatMat& b) const { return generator.commutator(b); }
    Mat generator_complex() const;
};

Derivation inner_derivation(const RatMat& a);

/// Element of the matrix differential graded algebra, kept in generator-list
/// normal form: a sum of terms m0 d(m1) ^ ... ^ d(ml) with exact
/// rational-complex coefficient matrices. Equality is decided by evaluation
/// on spanning tuples of derivations.
struct DGAElement {
    struct Term {
        RatMat coeff;                 // m0
        std::vector<RatMat> gens;     // m1 .. ml
    };
    int r = 0;
    int degree = 0;
    std::vector<Term> terms;

    static DGAElement zero(int r, int degree) {
        DGAElement e;
        e.r = r;
        e.degree = degree;
        return e;
    }
    static DGAElement function(const RatMat& m0) {
        DGAElement e;
        e.r = m0.rows();
        e.degree = 0;
        e.terms.push_back({m0, {}});
        return e;
    }
    static DGAElement form(const RatMat& m0, std::vector<RatMat> gens) {
        DGAElement e;
        e.r = m0.rows();
        e.degree = static_cast<int>(gens.size());
        e.terms.push_back({m0, std::move(gens)});
        return e;
    }

    /// Antisymmetrized evaluation on a tuple of derivations (degree many).
    RatMat evaluate(const std::vector<Derivation>& thetas) const;
};

/// Degree-one differential: m0 d(m1)^...^d(ml) -> d(m0)^d(m1)^...^d(ml).
DGAElement dga_d(const DGAElement& w);

/// Wedge product; right coefficients are pushed left through the Leibniz
/// rule so the result stays in normal form.
DGAElement dga_wedge(const DGAElement& a, const DGAElement& b);

/// Pairing of a derivation with a 1-form: sum m0 [m1, a].
RatMat pair_form(const Derivation& theta, const DGAElement& alpha);

/// Basis of the derivation space: inner derivations of the elementary
/// matrices e_i^j (i != j) and diagonal differences, dimension r^2 - 1.
std::vector<Derivation> derivation_basis(int r);

/// Exact rank of the map a -> ad(a) from M_r to endomorphisms.
int ad_rank(int r);

/// Push-forward of a derivation along a point map: theta(phi(f)).
Mat pushforward_derivation(const AzumayaPointMap& map, const Mat& generator,
                           const FnSpec& f);

// ---------------------------------------------------------------------------
// Derivations of a trivialized family over a 1-dimensional base, and the
// connection-induced splitting into a horizontal part and an inner part.
// ---------------------------------------------------------------------------

/// Matrix with univariate complex-polynomial entries.
class CPolyMat {
public:
    CPolyMat() : rows_(0), cols_(0) {}
    CPolyMat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    static CPolyMat zero(int n) { return CPolyMat(n, n); }
    static CPolyMat identity(int n) {
        CPolyMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = CPoly::constant(1.0);
        return m;
    }
    static CPolyMat constant(const Mat& v) {
        CPolyMat m(static_cast<int>(v.rows()), static_cast<int>(v.cols()));
        for (int i = 0; i < m.rows_; ++i)
            for (int j = 0; j < m.cols_; ++j)
                m(i, j) = CPoly::constant(v(i, j));
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    CPoly& operator()(int i, int j) { return a_[i * cols_ + j]; }
    const CPoly& operator()(int i, int j) const { return a_[i * cols_ + j]; }

    Mat eval(double x) const {
        Mat m(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(x);
        return m;
    }
    int max_degree() const {
        int d = 0;
        for (const auto& p : a_) d = std::max(d, p.degree());
        return d;
    }
    CPolyMat operator+(const CPolyMat& o) const {
        CPolyMat m(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
        return m;
    }
    CPolyMat operator-(const CPolyMat& o) const {
        CPolyMat m(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
        return m;
    }
    CPolyMat operator*(const CPolyMat& o) const {
        CPolyMat m(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k)
                for (int j = 0; j < o.cols_; ++j)
                    m(i, j) = m(i, j) + (*this)(i, k) * o(k, j);
        return m;
    }
    CPolyMat scale(const CPoly& s) const {
        CPolyMat m(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * s;
        return m;
    }
    CPolyMat commutator(const CPolyMat& o) const {
        return *this * o - o * *this;
    }
    double max_coeff_norm() const {
        double worst = 0.0;
        for (const auto& p : a_)
            for (const auto& c : p.coeffs()) worst = std::max(worst, std::abs(c));
        return worst;
    }

private:
    int rows_, cols_;
    std::vector<CPoly> a_;
};

/// The action data of a candidate derivation of the family algebra: its
/// value on the central coordinate x*Id and on the constant elementary
/// matrices e_i^j (row-major list of r^2 values).
struct DerivationActionData {
    int r = 0;
    CPolyMat on_center;                  // value on x*Id
    std::vector<CPolyMat> on_elementary; // values on e_i^j, row-major
};

/// Splitting with respect to the trivial connection: a horizontal component
/// with coefficient xi(x) plus the inner derivation of a trace-free a(x).
struct FamilyDerivation {
    CPoly xi;
    CPolyMat inner_generator;

    DerivationActionData action(int r) const;
};

FamilyDerivation split_derivation(const DerivationActionData& d,
                                  double residual_tol = 1e-9);

}  // namespace az
