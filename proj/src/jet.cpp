#include "azumaya/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace az {

namespace {

void enumerate(int n, int d, std::vector<int>& cur, int pos, int remaining,
               std::vector<std::vector<int>>& out) {
    if (pos == n) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        cur[pos] = k;
        enumerate(n, d, cur, pos + 1, remaining - k, out);
    }
    cur[pos] = 0;
}

int total(const std::vector<int>& a) {
    int s = 0;
    for (int v : a) s += v;
    return s;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

double multi_binomial(const std::vector<int>& gamma, const std::vector<int>& alpha) {
    double r = 1.0;
    for (size_t i = 0; i < gamma.size(); ++i) r *= binomial(gamma[i], alpha[i]);
    return r;
}

}  // namespace

MultiIndexSet::MultiIndexSet(int arity, int order) : n_(arity), d_(order) {
    std::vector<int> cur(arity, 0);
    // graded: all |alpha| = s for s = 0..d, lexicographic within a grade
    for (int s = 0; s <= order; ++s) {
        std::vector<std::vector<int>> grade;
        enumerate(arity, s, cur, 0, s, grade);
        for (auto& a : grade)
            if (total(a) == s) list_.push_back(std::move(a));
    }
}

int MultiIndexSet::rank_of(const std::vector<int>& alpha) const {
    for (int i = 0; i < size(); ++i)
        if (list_[i] == alpha) return i;
    return -1;
}

Cplx Jet::at(const std::vector<int>& alpha) const {
    MultiIndexSet mis(arity(), order);
    int r = mis.rank_of(alpha);
    if (r < 0 || r >= static_cast<int>(derivs.size())) return Cplx(0.0);
    return derivs[r];
}

double FnSpec::eval(const std::vector<double>& p) const {
    switch (kind) {
        case Kind::Polynomial:
            return num.eval(p);
        case Kind::Rational: {
            const double d = den.eval(p);
            if (std::abs(d) < 1e-300) throw PoleAtPoint("denominator vanishes");
            return num.eval(p) / d;
        }
        case Kind::Analytic: {
            const double u = num.eval(p);
            if (primitive == "sin") return std::sin(u);
            if (primitive == "cos") return std::cos(u);
            if (primitive == "exp") return std::exp(u);
            throw DomainError("unknown analytic primitive " + primitive);
        }
        case Kind::Numeric:
            return callable(p);
    }
    return 0.0;
}

FnSpec FnSpec::operator*(const FnSpec& o) const {
    if (kind == Kind::Polynomial && o.kind == Kind::Polynomial)
        return FnSpec::polynomial(num * o.num);
    if (kind == Kind::Rational && o.kind == Kind::Polynomial)
        return FnSpec::rational(num * o.num, den);
    if (kind == Kind::Polynomial && o.kind == Kind::Rational)
        return FnSpec::rational(num * o.num, o.den);
    if (kind == Kind::Rational && o.kind == Kind::Rational)
        return FnSpec::rational(num * o.num, den * o.den);
    throw DomainError("product only defined for polynomial/rational specs");
}

FnSpec FnSpec::operator+(const FnSpec& o) const {
    if (kind == Kind::Polynomial && o.kind == Kind::Polynomial)
        return FnSpec::polynomial(num + o.num);
    throw DomainError("sum only defined for polynomial specs");
}

namespace {

// Exact jet of a polynomial: derivative table filled by walking down from
// each multi-index's parent.
Jet polynomial_jet(const MPoly& p, const std::vector<double>& pt, int d) {
    const int n = static_cast<int>(pt.size());
    MultiIndexSet mis(n, d);
    Jet jet;
    jet.base_point = pt;
    jet.order = d;
    jet.derivs.resize(mis.size());
    std::vector<MPoly> table(mis.size());
    for (int r = 0; r < mis.size(); ++r) {
        const auto& alpha = mis.at(r);
        if (total(alpha) == 0) {
            table[r] = p;
        } else {
            // find parent alpha - e_i for the first nonzero axis
            int axis = 0;
            while (alpha[axis] == 0) ++axis;
            std::vector<int> parent = alpha;
            parent[axis] -= 1;
            table[r] = table[mis.rank_of(parent)].derivative(axis);
        }
        jet.derivs[r] = Cplx(table[r].eval(pt), 0.0);
    }
    return jet;
}

// Taylor-divide: find jet q with jet_product(q, den) == num, solving grade by
// grade through the Leibniz rule.
Jet jet_divide(const Jet& num, const Jet& den) {
    const int n = num.arity();
    const int d = num.order;
    MultiIndexSet mis(n, d);
    if (std::abs(den.derivs[0]) < 1e-300)
        throw PoleAtPoint("denominator vanishes at base point");
    Jet q;
    q.base_point = num.base_point;
    q.order = d;
    q.derivs.assign(mis.size(), Cplx(0.0));
    for (int r = 0; r < mis.size(); ++r) {
        const auto& gamma = mis.at(r);
        // d^gamma(num) = sum_{alpha <= gamma} C(gamma, alpha) q_alpha den_{gamma - alpha}
        Cplx rhs = num.derivs[r];
        for (int s = 0; s < r; ++s) {
            const auto& alpha = mis.at(s);
            bool le = true;
            std::vector<int> beta(n);
            for (int i = 0; i < n; ++i) {
                if (alpha[i] > gamma[i]) {
                    le = false;
                    break;
                }
                beta[i] = gamma[i] - alpha[i];
            }
            if (!le) continue;
            rhs -= multi_binomial(gamma, alpha) * q.derivs[s] *
                   den.derivs[mis.rank_of(beta)];
        }
        q.derivs[r] = rhs / den.derivs[0];
    }
    return q;
}

// Composition outer(inner) where outer has the given Taylor coefficients
// f^(j)(u0)/j! at u0 = inner(base point).
Jet jet_compose_series(const std::vector<double>& series_coeff, const Jet& inner) {
    const int d = inner.order;
    Jet shifted = inner;
    shifted.derivs[0] = 0.0;  // inner - u0
    Jet acc;
    acc.base_point = inner.base_point;
    acc.order = d;
    MultiIndexSet mis(inner.arity(), d);
    acc.derivs.assign(mis.size(), Cplx(0.0));
    acc.derivs[0] = Cplx(series_coeff[0], 0.0);
    Jet power = shifted;
    for (int j = 1; j <= d; ++j) {
        for (int r = 0; r < mis.size(); ++r)
            acc.derivs[r] += series_coeff[j] * power.derivs[r];
        if (j < d) power = jet_product(power, shifted);
    }
    return acc;
}

std::vector<double> primitive_series(const std::string& prim, double u0, int d) {
    // f^(j)(u0) / j!
    std::vector<double> c(d + 1);
    double fact = 1.0;
    for (int j = 0; j <= d; ++j) {
        if (j > 0) fact *= double(j);
        double deriv;
        if (prim == "sin") {
            switch (j % 4) {
                case 0: deriv = std::sin(u0); break;
                case 1: deriv = std::cos(u0); break;
                case 2: deriv = -std::sin(u0); break;
                default: deriv = -std::cos(u0); break;
            }
        } else if (prim == "cos") {
            switch (j % 4) {
                case 0: deriv = std::cos(u0); break;
                case 1: deriv = -std::sin(u0); break;
                case 2: deriv = -std::cos(u0); break;
                default: deriv = std::sin(u0); break;
            }
        } else if (prim == "exp") {
            deriv = std::exp(u0);
        } else {
            throw DomainError("unknown analytic primitive " + prim);
        }
        c[j] = deriv / fact;
    }
    return c;
}

// k-th central difference along one axis, applied recursively over axes.
double central_difference(const FnSpec& f, std::vector<double> pt,
                          const std::vector<int>& alpha, int axis, double h) {
    const int n = static_cast<int>(pt.size());
    while (axis < n && alpha[axis] == 0) ++axis;
    if (axis == n) return f.eval(pt);
    const int k = alpha[axis];
    std::vector<int> rest = alpha;
    rest[axis] = 0;
    double acc = 0.0;
    double sign = 1.0;
    const double base = pt[axis];
    for (int j = 0; j <= k; ++j) {
        pt[axis] = base + (double(k) / 2.0 - double(j)) * h;
        acc += sign * binomial(k, j) * central_difference(f, pt, rest, axis + 1, h);
        sign = -sign;
    }
    double hk = 1.0;
    for (int i = 0; i < k; ++i) hk *= h;
    return acc / hk;
}

Jet numeric_jet(const FnSpec& f, const std::vector<double>& pt, int d, double h) {
    const int n = static_cast<int>(pt.size());
    if (h <= 0.0) {
        double pmax = 1.0;
        for (double v : pt) pmax = std::max(pmax, std::abs(v));
        h = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / double(d + 2)) *
            pmax;
    }
    MultiIndexSet mis(n, d);
    Jet jet;
    jet.base_point = pt;
    jet.order = d;
    jet.derivs.resize(mis.size());
    for (int r = 0; r < mis.size(); ++r)
        jet.derivs[r] =
            Cplx(central_difference(f, pt, mis.at(r), 0, h), 0.0);
    return jet;
}

}  // namespace

Jet extract_jet(const FnSpec& f, const std::vector<double>& p, int d, double h) {
    if (d < 0) throw DomainError("jet order must be nonnegative");
    if (d > kMaxJetOrder)
        throw OrderTooHigh("jet order " + std::to_string(d) + " exceeds cap " +
                           std::to_string(kMaxJetOrder));
    if (static_cast<int>(p.size()) != f.arity)
        throw DimensionMismatch("point arity does not match function spec");
    switch (f.kind) {
        case FnSpec::Kind::Polynomial:
            return polynomial_jet(f.num, p, d);
        case FnSpec::Kind::Rational: {
            if (std::abs(f.den.eval(p)) < 1e-300)
                throw PoleAtPoint("denominator vanishes at evaluation point");
            Jet num = polynomial_jet(f.num, p, d);
            Jet den = polynomial_jet(f.den, p, d);
            return jet_divide(num, den);
        }
        case FnSpec::Kind::Analytic: {
            Jet inner = polynomial_jet(f.num, p, d);
            auto series = primitive_series(f.primitive, inner.derivs[0].real(), d);
            return jet_compose_series(series, inner);
        }
        case FnSpec::Kind::Numeric:
            return numeric_jet(f, p, d, h);
    }
    throw DomainError("unreachable");
}

Jet jet_product(const Jet& a, const Jet& b) {
    if (a.base_point != b.base_point)
        throw BasePointMismatch("jet base points differ");
    const int n = a.arity();
    // graded enumeration makes ranks of low-order indices stable, so the
    // inputs can be read through the truncated index set directly
    MultiIndexSet mis(n, std::min(a.order, b.order));
    Jet r;
    r.base_point = a.base_point;
    r.order = mis.order();
    r.derivs.assign(mis.size(), Cplx(0.0));
    for (int g = 0; g < mis.size(); ++g) {
        const auto& gamma = mis.at(g);
        Cplx acc(0.0);
        for (int s = 0; s < mis.size(); ++s) {
            const auto& alpha = mis.at(s);
            bool le = true;
            std::vector<int> beta(n);
            for (int i = 0; i < n; ++i) {
                if (alpha[i] > gamma[i]) {
                    le = false;
                    break;
                }
                beta[i] = gamma[i] - alpha[i];
            }
            if (!le) continue;
            acc += multi_binomial(gamma, alpha) * a.derivs[s] *
                   b.derivs[mis.rank_of(beta)];
        }
        r.derivs[g] = acc;
    }
    return r;
}

}  // namespace az
