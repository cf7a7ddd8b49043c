#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace az {

using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double v) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite value");
    if (v == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(v, &exp);  // v = mant * 2^exp, |mant| in [0.5, 1)
    long long m = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r(m);
    if (exp >= 0) {
        r *= boost::multiprecision::pow(boost::multiprecision::cpp_int(2), exp);
    } else {
        r /= boost::multiprecision::pow(boost::multiprecision::cpp_int(2), -exp);
    }
    return r;
}

inline double rational_to_double(const Rational& r) {
    return r.convert_to<double>();
}

/// Gaussian rational: exact complex number with rational parts.
struct GRat {
    Rational re, im;

    GRat() : re(0), im(0) {}
    GRat(long long r) : re(r), im(0) {}
    GRat(Rational r) : re(std::move(r)), im(0) {}
    GRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static GRat from_doubles(double r, double i) {
        return GRat(rational_from_double(r), rational_from_double(i));
    }

    bool is_zero() const { return re == 0 && im == 0; }
    GRat conj() const { return GRat(re, -im); }

    GRat operator+(const GRat& o) const { return GRat(re + o.re, im + o.im); }
    GRat operator-(const GRat& o) const { return GRat(re - o.re, im - o.im); }
    GRat operator-() const { return GRat(-re, -im); }
    GRat operator*(const GRat& o) const {
        return GRat(re * o.re - im * o.im, re * o.im + im * o.re);
    }
    GRat operator/(const GRat& o) const {
        Rational d = o.re * o.re + o.im * o.im;
        if (d == 0) throw std::runtime_error("division by zero");
        return GRat((re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d);
    }
    GRat& operator+=(const GRat& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GRat& operator-=(const GRat& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    bool operator==(const GRat& o) const { return re == o.re && im == o.im; }
    bool operator!=(const GRat& o) const { return !(*this == o); }

    double to_double_re() const { return rational_to_double(re); }
    double to_double_im() const { return rational_to_double(im); }
};

/// Dense matrix over the Gaussian rationals; just enough for exact algebra
/// at small sizes.
class RatMat {
public:
    RatMat() : rows_(0), cols_(0) {}
    RatMat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static RatMat identity(int n) {
        RatMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = GRat(1);
        return m;
    }
    static RatMat zero(int n) { return RatMat(n, n); }
    static RatMat unit(int n, int i, int j) {
        RatMat m(n, n);
        m(i, j) = GRat(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    GRat& operator()(int i, int j) { return a_[i * cols_ + j]; }
    const GRat& operator()(int i, int j) const { return a_[i * cols_ + j]; }

    bool is_zero() const {
        for (const auto& v : a_)
            if (!v.is_zero()) return false;
        return true;
    }
    GRat trace() const {
        GRat t;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    RatMat operator+(const RatMat& o) const {
        RatMat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
        return r;
    }
    RatMat operator-(const RatMat& o) const {
        RatMat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
        return r;
    }
    RatMat operator-() const {
        RatMat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
        return r;
    }
    RatMat operator*(const RatMat& o) const {
        RatMat r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                if ((*this)(i, k).is_zero()) continue;
                for (int j = 0; j < o.cols_; ++j)
                    r(i, j) += (*this)(i, k) * o(k, j);
            }
        return r;
    }
    RatMat operator*(const GRat& s) const {
        RatMat r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
        return r;
    }
    bool operator==(const RatMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    RatMat commutator(const RatMat& o) const { return *this * o - o * *this; }

    /// Subtract trace/n times the identity.
    RatMat traceless() const {
        RatMat r = *this;
        GRat t = trace() / GRat(Rational(rows_));
        for (int i = 0; i < rows_; ++i) r(i, i) -= t;
        return r;
    }

    /// Exact rank by Gaussian elimination.
    int rank() const {
        RatMat m = *this;
        int rank = 0;
        int row = 0;
        for (int col = 0; col < cols_ && row < rows_; ++col) {
            int pivot = -1;
            for (int i = row; i < rows_; ++i)
                if (!m(i, col).is_zero()) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) continue;
            for (int j = 0; j < cols_; ++j) std::swap(m(row, j), m(pivot, j));
            GRat inv = GRat(1) / m(row, col);
            for (int i = row + 1; i < rows_; ++i) {
                if (m(i, col).is_zero()) continue;
                GRat f = m(i, col) * inv;
                for (int j = col; j < cols_; ++j) m(i, j) -= f * m(row, j);
            }
            ++row;
            ++rank;
        }
        return rank;
    }

    /// Solve this * x = b exactly; returns false when the system is
    /// inconsistent or rank-deficient in the needed columns.
    bool solve(const std::vector<GRat>& b, std::vector<GRat>& x) const {
        const int n = cols_;
        RatMat m(rows_, cols_ + 1);
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
            m(i, cols_) = b[i];
        }
        std::vector<int> pivot_col;
        int row = 0;
        for (int col = 0; col < n && row < rows_; ++col) {
            int pivot = -1;
            for (int i = row; i < rows_; ++i)
                if (!m(i, col).is_zero()) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) continue;
            for (int j = 0; j <= n; ++j) std::swap(m(row, j), m(pivot, j));
            GRat inv = GRat(1) / m(row, col);
            for (int j = col; j <= n; ++j) m(row, j) = m(row, j) * inv;
            for (int i = 0; i < rows_; ++i) {
                if (i == row || m(i, col).is_zero()) continue;
                GRat f = m(i, col);
                for (int j = col; j <= n; ++j) m(i, j) -= f * m(row, j);
            }
            pivot_col.push_back(col);
            ++row;
        }
        for (int i = row; i < rows_; ++i)
            if (!m(i, n).is_zero()) return false;  // inconsistent
        x.assign(n, GRat());
        for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i)
            x[pivot_col[i]] = m(i, n);
        return true;
    }

private:
    int rows_, cols_;
    std::vector<GRat> a_;
};

}  // namespace az
