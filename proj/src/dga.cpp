#include "azumaya/dga.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace az {

Mat Derivation::generator_complex() const {
    Mat m(generator.rows(), generator.cols());
    for (int i = 0; i < generator.rows(); ++i)
        for (int j = 0; j < generator.cols(); ++j)
            m(i, j) = Cplx(generator(i, j).to_double_re(),
                           generator(i, j).to_double_im());
    return m;
}

Derivation inner_derivation(const RatMat& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("generator not square");
    return Derivation{a.traceless()};
}

namespace {

// permutations with signs, by Heap's algorithm
void permutations(int l, std::vector<std::pair<std::vector<int>, int>>& out) {
    std::vector<int> idx(l);
    std::iota(idx.begin(), idx.end(), 0);
    std::function<void(int, int)> rec = [&](int k, int sign) {
        if (k == 1) {
            out.emplace_back(idx, sign);
            return;
        }
        for (int i = 0; i < k; ++i) {
            rec(k - 1, sign);
            if (k % 2 == 0) {
                std::swap(idx[i], idx[k - 1]);
            } else {
                std::swap(idx[0], idx[k - 1]);
            }
            sign = -sign;
        }
    };
    if (l == 0) {
        out.emplace_back(std::vector<int>{}, 1);
        return;
    }
    rec(l, 1);
}

bool is_central(const RatMat& m) { return m.traceless().is_zero(); }

}  // namespace

RatMat DGAElement::evaluate(const std::vector<Derivation>& thetas) const {
    if (static_cast<int>(thetas.size()) != degree)
        throw DegreeMismatch("evaluation needs degree-many derivations");
    RatMat acc = RatMat::zero(r);
    if (degree == 0) {
        for (const auto& t : terms) acc = acc + t.coeff;
        return acc;
    }
    std::vector<std::pair<std::vector<int>, int>> perms;
    permutations(degree, perms);
    for (const auto& t : terms) {
        RatMat term_acc = RatMat::zero(r);
        for (const auto& [sigma, sign] : perms) {
            RatMat prod = t.gens[0].commutator(thetas[sigma[0]].generator);
            for (int j = 1; j < degree; ++j)
                prod = prod * t.gens[j].commutator(thetas[sigma[j]].generator);
            if (sign > 0)
                term_acc = term_acc + prod;
            else
                term_acc = term_acc - prod;
        }
        acc = acc + t.coeff * term_acc;
    }
    return acc;
}

DGAElement dga_d(const DGAElement& w) {
    DGAElement out = DGAElement::zero(w.r, w.degree + 1);
    for (const auto& t : w.terms) {
        if (is_central(t.coeff)) continue;  // d of a central coefficient is 0
        DGAElement::Term nt;
        nt.coeff = RatMat::identity(w.r);
        nt.gens.push_back(t.coeff);
        for (const auto& g : t.gens) nt.gens.push_back(g);
        out.terms.push_back(std::move(nt));
    }
    return out;
}

namespace {

// right-multiplication of a normal-form term by a ring element, expanded
// back into normal form through d(g b) = d(g) b + g d(b)
std::vector<DGAElement::Term> term_times(const DGAElement::Term& t,
                                         const RatMat& b);

std::vector<DGAElement::Term> terms_times(std::vector<DGAElement::Term> ts,
                                          const RatMat& b) {
    std::vector<DGAElement::Term> out;
    for (const auto& t : ts) {
        auto expanded = term_times(t, b);
        out.insert(out.end(), expanded.begin(), expanded.end());
    }
    return out;
}

std::vector<DGAElement::Term> term_times(const DGAElement::Term& t,
                                         const RatMat& b) {
    std::vector<DGAElement::Term> out;
    if (t.gens.empty()) {
        out.push_back({t.coeff * b, {}});
        return out;
    }
    // (m0 dg1...dgl) b = m0 dg1...d(gl b) - (m0 dg1...dg_{l-1}) gl ^ d(b)
    DGAElement::Term head;
    head.coeff = t.coeff;
    head.gens = t.gens;
    head.gens.back() = t.gens.back() * b;
    out.push_back(std::move(head));

    DGAElement::Term shorter;
    shorter.coeff = t.coeff;
    shorter.gens.assign(t.gens.begin(), t.gens.end() - 1);
    auto pushed = term_times(shorter, t.gens.back());
    for (auto& p : pushed) {
        p.gens.push_back(b);
        p.coeff = -p.coeff;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

DGAElement dga_wedge(const DGAElement& a, const DGAElement& b) {
    if (a.r != b.r) throw DimensionMismatch("rank mismatch in wedge");
    DGAElement out = DGAElement::zero(a.r, a.degree + b.degree);
    for (const auto& ta : a.terms) {
        for (const auto& tb : b.terms) {
            // (ta) ^ (m0' dg') = (ta . m0') ^ dg'
            auto pushed = term_times(ta, tb.coeff);
            for (auto& p : pushed) {
                DGAElement::Term nt = p;
                for (const auto& g : tb.gens) nt.gens.push_back(g);
                out.terms.push_back(std::move(nt));
            }
        }
    }
    // drop syntactic zeros
    std::vector<DGAElement::Term> kept;
    for (auto& t : out.terms) {
        if (t.coeff.is_zero()) continue;
        bool central_gen = false;
        for (const auto& g : t.gens)
            if (is_central(g)) {
                central_gen = true;
                break;
            }
        if (central_gen) continue;
        kept.push_back(std::move(t));
    }
    out.terms = std::move(kept);
    return out;
}

RatMat pair_form(const Derivation& theta, const DGAElement& alpha) {
    if (alpha.degree != 1) throw DegreeMismatch("pairing needs a 1-form");
    RatMat acc = RatMat::zero(alpha.r);
    for (const auto& t : alpha.terms)
        acc = acc + t.coeff * t.gens[0].commutator(theta.generator);
    return acc;
}

std::vector<Derivation> derivation_basis(int r) {
    std::vector<Derivation> basis;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (i == j) continue;
            basis.push_back(inner_derivation(RatMat::unit(r, i, j)));
        }
    for (int i = 0; i + 1 < r; ++i) {
        RatMat h(r, r);
        h(i, i) = GRat(1);
        h(i + 1, i + 1) = GRat(-1);
        basis.push_back(inner_derivation(h));
    }
    return basis;
}

int ad_rank(int r) {
    // matrix of a -> ad(a) over the elementary basis: rows index the pair
    // (action input, output entry), columns index the generator entry
    const int n2 = r * r;
    RatMat big(n2 * n2, n2);
    for (int ga = 0; ga < n2; ++ga) {
        RatMat a = RatMat::unit(r, ga / r, ga % r);
        for (int gb = 0; gb < n2; ++gb) {
            RatMat b = RatMat::unit(r, gb / r, gb % r);
            RatMat c = a.commutator(b);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    big(gb * n2 + i * r + j, ga) = c(i, j);
        }
    }
    return big.rank();
}

Mat pushforward_derivation(const AzumayaPointMap& map, const Mat& generator,
                           const FnSpec& f) {
    Mat value = evaluate(map, f);
    return generator * value - value * generator;
}

DerivationActionData FamilyDerivation::action(int r) const {
    DerivationActionData d;
    d.r = r;
    // value on x*Id: xi(x) d/dx (x) Id = xi Id  (inner part kills the center)
    d.on_center = CPolyMat::identity(r).scale(xi);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            Mat e = Mat::Zero(r, r);
            e(i, j) = 1.0;
            // constant sections have zero horizontal derivative
            d.on_elementary.push_back(inner_generator.commutator(CPolyMat::constant(e)));
        }
    return d;
}

FamilyDerivation split_derivation(const DerivationActionData& d,
                                  double residual_tol) {
    const int r = d.r;
    // central part of the value on x*Id
    CPoly xi;
    {
        // xi = trace / r; the off-center residual is checked below
        std::vector<Cplx> tr;
        int deg = d.on_center.max_degree();
        tr.assign(deg + 1, Cplx(0.0));
        for (int i = 0; i < r; ++i)
            for (int k = 0; k <= deg; ++k)
                tr[k] += d.on_center(i, i).coeff(k) / double(r);
        // keep as a complex polynomial; real inputs stay real
        CPoly complex_xi{std::vector<Cplx>(tr)};
        xi = complex_xi;
    }
    // residual of the central value
    {
        CPolyMat resid = d.on_center - CPolyMat::identity(r).scale(xi);
        if (resid.max_coeff_norm() > residual_tol)
            throw NotADerivation("value on the central coordinate is not central");
    }

    // solve ad(a_k)(e_ij) = coefficient k of D(e_ij) for each power k,
    // via least squares over the real and imaginary parts
    int deg = 0;
    for (const auto& m : d.on_elementary) deg = std::max(deg, m.max_degree());
    const int n2 = r * r;
    // build the real 2(n2*n2) x 2(n2) system matrix for ad
    Eigen::MatrixXd ad_op(2 * n2 * n2, 2 * n2);
    ad_op.setZero();
    for (int ga = 0; ga < n2; ++ga) {
        Mat a = Mat::Zero(r, r);
        a(ga / r, ga % r) = 1.0;
        for (int gb = 0; gb < n2; ++gb) {
            Mat b = Mat::Zero(r, r);
            b(gb / r, gb % r) = 1.0;
            Mat c = a * b - b * a;
            for (int out = 0; out < n2; ++out) {
                // commutators of elementary matrices are real, so the
                // complex-linear action is two identical real blocks
                const double v = c(out / r, out % r).real();
                const int row = gb * n2 + out;
                ad_op(2 * row, 2 * ga) = v;
                ad_op(2 * row + 1, 2 * ga + 1) = v;
            }
        }
    }
    auto solver = ad_op.colPivHouseholderQr();

    std::vector<Mat> a_coeffs(deg + 1, Mat::Zero(r, r));
    double worst_residual = 0.0;
    for (int k = 0; k <= deg; ++k) {
        Eigen::VectorXd rhs(2 * n2 * n2);
        for (int gb = 0; gb < n2; ++gb) {
            const CPolyMat& val = d.on_elementary[gb];
            for (int out = 0; out < n2; ++out) {
                const Cplx v = val(out / r, out % r).coeff(k);
                rhs(2 * (gb * n2 + out)) = v.real();
                rhs(2 * (gb * n2 + out) + 1) = v.imag();
            }
        }
        Eigen::VectorXd sol = solver.solve(rhs);
        worst_residual = std::max(worst_residual, (ad_op * sol - rhs).norm());
        Mat ak(r, r);
        for (int ga = 0; ga < n2; ++ga)
            ak(ga / r, ga % r) = Cplx(sol(2 * ga), sol(2 * ga + 1));
        // trace-free normalization
        ak -= (ak.trace() / double(r)) * Mat::Identity(r, r);
        a_coeffs[k] = ak;
    }
    if (worst_residual > residual_tol)
        throw NotADerivation("action on constant sections is not inner (residual " +
                             std::to_string(worst_residual) + ")");

    FamilyDerivation fd;
    fd.xi = xi;
    fd.inner_generator = CPolyMat(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            std::vector<Cplx> c(deg + 1);
            for (int k = 0; k <= deg; ++k) c[k] = a_coeffs[k](i, j);
            fd.inner_generator(i, j) = CPoly(std::move(c));
        }
    return fd;
}

}  // namespace az
