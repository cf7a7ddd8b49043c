#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace az {

using Cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Univariate real polynomial, coefficient-ascending.
// ---------------------------------------------------------------------------
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<double> c) : c_(std::move(c)) { trim(); }
    static Poly constant(double v) { return Poly({v}); }
    static Poly x() { return Poly({0.0, 1.0}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool zero() const { return c_.empty(); }
    double coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : 0.0;
    }
    const std::vector<double>& coeffs() const { return c_; }

    double eval(double x) const {
        double acc = 0.0;
        for (int i = degree(); i >= 0; --i) acc = acc * x + c_[i];
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<double> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * double(i);
        return Poly(std::move(d));
    }

    Poly operator+(const Poly& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return Poly(std::move(r));
    }
    Poly operator-(const Poly& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
        return Poly(std::move(r));
    }
    Poly operator*(const Poly& o) const {
        if (zero() || o.zero()) return Poly();
        std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Poly(std::move(r));
    }
    Poly operator*(double s) const {
        std::vector<double> r(c_);
        for (auto& v : r) v *= s;
        return Poly(std::move(r));
    }
    Poly operator-() const { return (*this) * -1.0; }

    bool operator==(const Poly& o) const { return c_ == o.c_; }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

// ---------------------------------------------------------------------------
// Univariate complex polynomial.
// ---------------------------------------------------------------------------
class CPoly {
public:
    CPoly() = default;
    explicit CPoly(std::vector<Cplx> c) : c_(std::move(c)) { trim(); }
    CPoly(const Poly& p) {
        c_.reserve(p.coeffs().size());
        for (double v : p.coeffs()) c_.emplace_back(v, 0.0);
        trim();
    }
    static CPoly constant(Cplx v) { return CPoly(std::vector<Cplx>{v}); }
    static CPoly x() { return CPoly(std::vector<Cplx>{Cplx(0.0), Cplx(1.0)}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool zero() const { return c_.empty(); }
    Cplx coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : Cplx(0.0);
    }
    const std::vector<Cplx>& coeffs() const { return c_; }

    Cplx eval(double x) const {
        Cplx acc(0.0);
        for (int i = degree(); i >= 0; --i) acc = acc * x + c_[i];
        return acc;
    }

    CPoly derivative() const {
        if (c_.size() <= 1) return CPoly();
        std::vector<Cplx> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * double(i);
        return CPoly(std::move(d));
    }

    double max_imag() const {
        double m = 0.0;
        for (const auto& v : c_) m = std::max(m, std::abs(v.imag()));
        return m;
    }
    Poly real_part() const {
        std::vector<double> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i].real();
        return Poly(std::move(r));
    }

    CPoly operator+(const CPoly& o) const {
        std::vector<Cplx> r(std::max(c_.size(), o.c_.size()), Cplx(0.0));
        for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return CPoly(std::move(r));
    }
    CPoly operator-(const CPoly& o) const {
        std::vector<Cplx> r(std::max(c_.size(), o.c_.size()), Cplx(0.0));
        for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
        return CPoly(std::move(r));
    }
    CPoly operator*(const CPoly& o) const {
        if (zero() || o.zero()) return CPoly();
        std::vector<Cplx> r(c_.size() + o.c_.size() - 1, Cplx(0.0));
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return CPoly(std::move(r));
    }
    CPoly operator*(Cplx s) const {
        std::vector<Cplx> r(c_);
        for (auto& v : r) v *= s;
        return CPoly(std::move(r));
    }
    CPoly operator-() const { return (*this) * Cplx(-1.0); }

private:
    void trim() {
        while (!c_.empty() && c_.back() == Cplx(0.0)) c_.pop_back();
    }
    std::vector<Cplx> c_;
};

// ---------------------------------------------------------------------------
// Real bivariate polynomial, c[i][j] x^i t^j (or (x,y), (u,v) as context needs).
// ---------------------------------------------------------------------------
class Poly2 {
public:
    Poly2() = default;
    explicit Poly2(std::vector<std::vector<double>> c) : c_(std::move(c)) { trim(); }
    static Poly2 constant(double v) {
        return Poly2(std::vector<std::vector<double>>{{v}});
    }
    static Poly2 var1() {  // x
        return Poly2(std::vector<std::vector<double>>{{0.0}, {1.0}});
    }
    static Poly2 var2() {  // t
        return Poly2(std::vector<std::vector<double>>{{0.0, 1.0}});
    }

    bool zero() const { return c_.empty(); }
    int degree1() const { return static_cast<int>(c_.size()) - 1; }
    int degree2() const {
        int d = -1;
        for (const auto& row : c_) d = std::max(d, static_cast<int>(row.size()) - 1);
        return d;
    }
    double coeff(int i, int j) const {
        if (i < 0 || i >= static_cast<int>(c_.size())) return 0.0;
        if (j < 0 || j >= static_cast<int>(c_[i].size())) return 0.0;
        return c_[i][j];
    }
    const std::vector<std::vector<double>>& coeffs() const { return c_; }

    double eval(double x, double t) const {
        double acc = 0.0;
        for (int i = degree1(); i >= 0; --i) {
            double row = 0.0;
            for (int j = static_cast<int>(c_[i].size()) - 1; j >= 0; --j)
                row = row * t + c_[i][j];
            acc = acc * x + row;
        }
        return acc;
    }

    // Substitute the second variable, leaving a polynomial in the first.
    Poly at_var2(double t) const {
        std::vector<double> r(c_.size(), 0.0);
        for (size_t i = 0; i < c_.size(); ++i) {
            double row = 0.0;
            for (int j = static_cast<int>(c_[i].size()) - 1; j >= 0; --j)
                row = row * t + c_[i][j];
            r[i] = row;
        }
        return Poly(std::move(r));
    }

    Poly2 d1() const {  // d/dx
        if (c_.size() <= 1) return Poly2();
        std::vector<std::vector<double>> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) {
            d[i - 1] = c_[i];
            for (auto& v : d[i - 1]) v *= double(i);
        }
        return Poly2(std::move(d));
    }
    Poly2 d2() const {  // d/dt
        std::vector<std::vector<double>> d(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].size() <= 1) continue;
            d[i].resize(c_[i].size() - 1);
            for (size_t j = 1; j < c_[i].size(); ++j) d[i][j - 1] = c_[i][j] * double(j);
        }
        return Poly2(std::move(d));
    }

    Poly2 operator+(const Poly2& o) const {
        std::vector<std::vector<double>> r(std::max(c_.size(), o.c_.size()));
        for (size_t i = 0; i < r.size(); ++i) {
            size_t w = 0;
            if (i < c_.size()) w = std::max(w, c_[i].size());
            if (i < o.c_.size()) w = std::max(w, o.c_[i].size());
            r[i].assign(w, 0.0);
            if (i < c_.size())
                for (size_t j = 0; j < c_[i].size(); ++j) r[i][j] += c_[i][j];
            if (i < o.c_.size())
                for (size_t j = 0; j < o.c_[i].size(); ++j) r[i][j] += o.c_[i][j];
        }
        return Poly2(std::move(r));
    }
    Poly2 operator*(const Poly2& o) const {
        if (zero() || o.zero()) return Poly2();
        std::vector<std::vector<double>> r(c_.size() + o.c_.size() - 1);
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t k = 0; k < o.c_.size(); ++k) {
                if (c_[i].empty() || o.c_[k].empty()) continue;
                auto& row = r[i + k];
                if (row.size() < c_[i].size() + o.c_[k].size() - 1)
                    row.resize(c_[i].size() + o.c_[k].size() - 1, 0.0);
                for (size_t j = 0; j < c_[i].size(); ++j)
                    for (size_t l = 0; l < o.c_[k].size(); ++l)
                        row[j + l] += c_[i][j] * o.c_[k][l];
            }
        return Poly2(std::move(r));
    }
    Poly2 operator*(double s) const {
        auto r = c_;
        for (auto& row : r)
            for (auto& v : row) v *= s;
        return Poly2(std::move(r));
    }
    Poly2 operator-(const Poly2& o) const { return *this + o * -1.0; }

private:
    void trim() {
        for (auto& row : c_)
            while (!row.empty() && row.back() == 0.0) row.pop_back();
        while (!c_.empty() && c_.back().empty()) c_.pop_back();
    }
    std::vector<std::vector<double>> c_;
};

// ---------------------------------------------------------------------------
// Multivariate real polynomial on R^n: exponent vector -> coefficient.
// ---------------------------------------------------------------------------
class MPoly {
public:
    using Exp = std::vector<int>;

    MPoly() : n_(0) {}
    explicit MPoly(int arity) : n_(arity) {}

    static MPoly constant(int arity, double v) {
        MPoly p(arity);
        if (v != 0.0) p.terms_[Exp(arity, 0)] = v;
        return p;
    }
    static MPoly coordinate(int arity, int axis) {
        MPoly p(arity);
        Exp e(arity, 0);
        e[axis] = 1;
        p.terms_[e] = 1.0;
        return p;
    }

    int arity() const { return n_; }
    bool zero() const { return terms_.empty(); }
    const std::map<Exp, double>& terms() const { return terms_; }
    int total_degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int v : e) s += v;
            d = std::max(d, s);
        }
        return d;
    }

    void add_term(const Exp& e, double c) {
        if (c == 0.0) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_[e] = c;
        } else {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    double eval(const std::vector<double>& p) const {
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double m = c;
            for (int i = 0; i < n_; ++i)
                for (int k = 0; k < e[i]; ++k) m *= p[i];
            acc += m;
        }
        return acc;
    }

    MPoly derivative(int axis) const {
        MPoly d(n_);
        for (const auto& [e, c] : terms_) {
            if (e[axis] == 0) continue;
            Exp f = e;
            f[axis] -= 1;
            d.add_term(f, c * double(e[axis]));
        }
        return d;
    }

    MPoly operator+(const MPoly& o) const {
        MPoly r = *this;
        for (const auto& [e, c] : o.terms_) r.add_term(e, c);
        return r;
    }
    MPoly operator-(const MPoly& o) const {
        MPoly r = *this;
        for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
        return r;
    }
    MPoly operator*(const MPoly& o) const {
        MPoly r(n_);
        for (const auto& [e1, c1] : terms_)
            for (const auto& [e2, c2] : o.terms_) {
                Exp e(n_);
                for (int i = 0; i < n_; ++i) e[i] = e1[i] + e2[i];
                r.add_term(e, c1 * c2);
            }
        return r;
    }
    MPoly operator*(double s) const {
        MPoly r(n_);
        for (const auto& [e, c] : terms_) r.add_term(e, c * s);
        return r;
    }
    MPoly pow(int k) const {
        MPoly r = constant(n_, 1.0);
        for (int i = 0; i < k; ++i) r = r * (*this);
        return r;
    }

private:
    int n_;
    std::map<Exp, double> terms_;
};

// ---------------------------------------------------------------------------
// Finite Fourier series a0 + sum_k (a_k cos kx + b_k sin kx), for circle bases.
// ---------------------------------------------------------------------------
class TrigPoly {
public:
    TrigPoly() = default;
    TrigPoly(double a0, std::vector<double> ac, std::vector<double> bs)
        : a0_(a0), ac_(std::move(ac)), bs_(std::move(bs)) {}

    double eval(double x) const {
        double acc = a0_;
        for (size_t k = 0; k < ac_.size(); ++k) acc += ac_[k] * std::cos(double(k + 1) * x);
        for (size_t k = 0; k < bs_.size(); ++k) acc += bs_[k] * std::sin(double(k + 1) * x);
        return acc;
    }
    TrigPoly derivative() const {
        std::vector<double> ac(bs_.size()), bs(ac_.size());
        for (size_t k = 0; k < bs_.size(); ++k) ac[k] = bs_[k] * double(k + 1);
        for (size_t k = 0; k < ac_.size(); ++k) bs[k] = -ac_[k] * double(k + 1);
        return TrigPoly(0.0, std::move(ac), std::move(bs));
    }
    double a0() const { return a0_; }
    const std::vector<double>& cos_coeffs() const { return ac_; }
    const std::vector<double>& sin_coeffs() const { return bs_; }

private:
    double a0_ = 0.0;
    std::vector<double> ac_, bs_;
};

}  // namespace az
