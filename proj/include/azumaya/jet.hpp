#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "azumaya/errors.hpp"
#include "azumaya/poly.hpp"

namespace az {

constexpr int kMaxJetOrder = 12;

/// Enumeration of the multi-indices alpha with |alpha| <= d over n variables,
/// in graded lexicographic order, with rank lookup.
class MultiIndexSet {
public:
    MultiIndexSet(int arity, int order);
    int arity() const { return n_; }
    int order() const { return d_; }
    int size() const { return static_cast<int>(list_.size()); }
    const std::vector<int>& at(int rank) const { return list_[rank]; }
    int rank_of(const std::vector<int>& alpha) const;  // -1 if absent

private:
    int n_, d_;
    std::vector<std::vector<int>> list_;
};

/// Truncated jet: raw partial derivative values d^alpha f(base_point) for
/// |alpha| <= order (not divided by alpha!).
struct Jet {
    std::vector<double> base_point;
    int order = 0;
    std::vector<Cplx> derivs;  // indexed by MultiIndexSet rank

    int arity() const { return static_cast<int>(base_point.size()); }
    Cplx at(const std::vector<int>& alpha) const;
    Cplx value() const { return derivs.empty() ? Cplx(0.0) : derivs[0]; }
};

/// Test-function specification: exact kinds (polynomial, rational, analytic
/// primitive of a polynomial argument) plus a numeric black-box fallback
/// differentiated by central differences.
struct FnSpec {
    enum class Kind { Polynomial, Rational, Analytic, Numeric };
    Kind kind = Kind::Polynomial;
    int arity = 0;
    MPoly num;                    // Polynomial / Rational numerator / Analytic argument
    MPoly den;                    // Rational denominator
    std::string primitive;        // "sin" | "cos" | "exp" for Analytic
    std::function<double(const std::vector<double>&)> callable;  // Numeric

    static FnSpec polynomial(MPoly p) {
        FnSpec f;
        f.kind = Kind::Polynomial;
        f.arity = p.arity();
        f.num = std::move(p);
        return f;
    }
    static FnSpec rational(MPoly p, MPoly q) {
        FnSpec f;
        f.kind = Kind::Rational;
        f.arity = p.arity();
        f.num = std::move(p);
        f.den = std::move(q);
        return f;
    }
    static FnSpec analytic(const std::string& prim, MPoly arg) {
        FnSpec f;
        f.kind = Kind::Analytic;
        f.arity = arg.arity();
        f.primitive = prim;
        f.num = std::move(arg);
        return f;
    }
    static FnSpec numeric(int arity,
                          std::function<double(const std::vector<double>&)> fn) {
        FnSpec f;
        f.kind = Kind::Numeric;
        f.arity = arity;
        f.callable = std::move(fn);
        return f;
    }

    bool exact() const { return kind != Kind::Numeric; }
    double eval(const std::vector<double>& p) const;
    FnSpec operator*(const FnSpec& o) const;  // exact kinds only
    FnSpec operator+(const FnSpec& o) const;  // polynomials only
};

/// Jet of f at p through order d. For the numeric kind h is the finite
/// difference step; h <= 0 selects eps^(1/(d+2)) scaled by max(1, |p|_inf).
Jet extract_jet(const FnSpec& f, const std::vector<double>& p, int d,
                double h = 0.0);

/// Leibniz product of two jets at the same base point; order is the min of
/// the input orders.
Jet jet_product(const Jet& a, const Jet& b);

}  // namespace az
