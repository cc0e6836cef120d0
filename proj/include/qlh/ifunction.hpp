#ifndef QLH_IFUNCTION_HPP
#define QLH_IFUNCTION_HPP

#include <qlh/scenario.hpp>

#include <climits>
#include <set>

namespace qlh {

// Cohomology-valued Laurent polynomial in z. Always finite by nilpotency.
struct ZLaurent {
    std::map<int, CohClass> c;

    bool is_zero() const { return c.empty(); }

    void add(int k, const CohClass& v) {
        if (coh_is_zero(v)) return;
        auto it = c.find(k);
        if (it == c.end()) {
            c[k] = v;
        } else {
            it->second = coh_add(it->second, v);
            if (coh_is_zero(it->second)) c.erase(it);
        }
    }

    friend ZLaurent operator+(const ZLaurent& a, const ZLaurent& b) {
        ZLaurent r = a;
        for (auto& [k, v] : b.c) r.add(k, v);
        return r;
    }
    friend ZLaurent operator-(const ZLaurent& a, const ZLaurent& b) {
        ZLaurent r = a;
        for (auto& [k, v] : b.c) r.add(k, coh_scale(rat(-1), v));
        return r;
    }
    ZLaurent scaled(const Rational& s) const {
        ZLaurent r;
        if (qlh::is_zero(s)) return r;
        for (auto& [k, v] : c) r.c[k] = coh_scale(s, v);
        return r;
    }
    ZLaurent shifted_z(int dk) const {
        ZLaurent r;
        for (auto& [k, v] : c) r.c[k + dk] = v;
        return r;
    }
    bool operator==(const ZLaurent& o) const { return c == o.c; }

    int max_z() const { return c.empty() ? INT_MIN : c.rbegin()->first; }
    int min_z() const { return c.empty() ? INT_MAX : c.begin()->first; }

    CohClass at(int k, const TotalAlgebra& A) const {
        auto it = c.find(k);
        return it == c.end() ? A.zero() : it->second;
    }

    static ZLaurent unit(const TotalAlgebra& A) {
        ZLaurent r;
        r.c[0] = A.unit();
        return r;
    }

    ZLaurent mul(const TotalAlgebra& A, const ZLaurent& o) const {
        ZLaurent r;
        for (auto& [k1, v1] : c)
            for (auto& [k2, v2] : o.c) r.add(k1 + k2, A.mul(v1, v2));
        return r;
    }

    // multiply by (v + m z)
    ZLaurent mul_linear(const TotalAlgebra& A, const CohClass& v, const Rational& m) const {
        ZLaurent r;
        for (auto& [k, w] : c) {
            r.add(k, A.mul(v, w));
            if (!qlh::is_zero(m)) r.add(k + 1, coh_scale(m, w));
        }
        return r;
    }

    // multiply by 1/(v + m z) with m != 0, via the nilpotent expansion
    // (1/(mz)) sum_k (-v/(mz))^k.
    ZLaurent div_linear(const TotalAlgebra& A, const CohClass& v, const Rational& m) const {
        if (qlh::is_zero(m))
            throw std::domain_error("reciprocal of a pure cohomology class requested");
        ZLaurent inv;
        Rational minv = Rational(1) / m;
        CohClass pw = A.unit();
        int k = 0;
        while (!coh_is_zero(pw)) {
            inv.add(-1 - k, coh_scale((k % 2 ? -1 : 1) * rat_pow(minv, k + 1), pw));
            pw = A.mul(pw, v);
            ++k;
        }
        return mul(A, inv);
    }
};

// Directed product factor prod_{m=1}^{s} (v + m z), inverted for s >= 1 and
// placed in the numerator (including the pure m = 0 class) for s <= -1.
inline ZLaurent directed_product(const TotalAlgebra& A, const CohClass& v, int s) {
    ZLaurent out = ZLaurent::unit(A);
    if (s >= 1) {
        for (int m = 1; m <= s; ++m) out = out.div_linear(A, v, Rational(m));
    } else if (s <= -1) {
        for (int m = s + 1; m <= 0; ++m) out = out.mul_linear(A, v, Rational(m));
    }
    return out;
}

// Relative factor A_beta B_beta C_beta of the fibration X -> S.
inline ZLaurent relative_factor(const Scenario& sc, const CurveClass& beta) {
    const TotalAlgebra& A = sc.alg();
    CurveOps ops = sc.curves();
    auto m = ops.mu(beta.beta_s);
    ZLaurent out = ZLaurent::unit(A);
    for (int i = 0; i <= sc.r; ++i) {
        CohClass ai = coh_add(A.h_class(), A.L_class(i));
        out = out.mul(A, directed_product(A, ai, beta.d + m[i]));
        if (out.is_zero()) return out;
    }
    if (sc.kind == BundleKind::DoubleBundle) {
        auto mp = ops.mup(beta.beta_s);
        CohClass xi = A.xi_class();
        for (int i = 0; i <= sc.r; ++i) {
            CohClass bi = coh_add(xi, coh_add(coh_scale(rat(-1), A.h_class()), A.Lp_class(i)));
            out = out.mul(A, directed_product(A, bi, beta.d2 - beta.d + mp[i]));
            if (out.is_zero()) return out;
        }
        out = out.mul(A, directed_product(A, xi, beta.d2));
    }
    return out;
}

// Same factor with the xi Gamma ratio replaced by its xi-free part
// 1/(d2! z^{d2}), the convention used by the regularization pipeline.
inline ZLaurent relative_factor_xi_stripped(const Scenario& sc, const CurveClass& beta) {
    if (sc.kind != BundleKind::DoubleBundle || beta.d2 < 0)
        throw std::domain_error("xi-stripped factor requires d2 >= 0 double bundle data");
    const TotalAlgebra& A = sc.alg();
    CurveOps ops = sc.curves();
    auto m = ops.mu(beta.beta_s);
    auto mp = ops.mup(beta.beta_s);
    ZLaurent out = ZLaurent::unit(A);
    for (int i = 0; i <= sc.r; ++i) {
        CohClass ai = coh_add(A.h_class(), A.L_class(i));
        out = out.mul(A, directed_product(A, ai, beta.d + m[i]));
    }
    CohClass xi = A.xi_class();
    for (int i = 0; i <= sc.r; ++i) {
        CohClass bi = coh_add(xi, coh_add(coh_scale(rat(-1), A.h_class()), A.Lp_class(i)));
        out = out.mul(A, directed_product(A, bi, beta.d2 - beta.d + mp[i]));
    }
    return out.scaled(Rational(1) / factorial(beta.d2)).shifted_z(-beta.d2);
}

// J-function coefficients of the base, as classes on X. Only the builtin
// bases carry hypergeometric data.
inline ZLaurent base_j_factor(const Scenario& sc, const std::vector<int>& beta_s) {
    const TotalAlgebra& A = sc.alg();
    if (sc.base.id == "point") {
        if (!beta_s.empty() && beta_s[0] != 0) return {};
        return ZLaurent::unit(A);
    }
    if (sc.base.id == "p1") {
        int s = beta_s.at(0);
        if (s < 0) return {};
        CohClass p = A.base_embed(A.base().basis_class(1));
        ZLaurent out = ZLaurent::unit(A);
        for (int m = 1; m <= s; ++m) {
            out = out.div_linear(A, p, Rational(m));
            out = out.div_linear(A, p, Rational(m));
        }
        return out;
    }
    throw std::domain_error("no builtin J-function for base '" + sc.base.id + "'");
}

// Truncated hypergeometric modification. Entries are stored per curve
// class with the prefactor exp(t-hat/z) kept symbolic and the divisor
// exponentials folded into the grouped Novikov variables.
struct SeriesI {
    const Scenario* sc = nullptr;
    std::map<CurveClass, ZLaurent> terms;

    const TotalAlgebra& alg() const { return sc->alg(); }

    bool in_box(const CurveClass& b) const {
        CurveOps ops = sc->curves();
        if (!ops.effective_base(b.beta_s) || b.base_total() > sc->box.bs) return false;
        if (b.d < -ops.mu_I(b.beta_s) - sc->box.dmargin || b.d > sc->box.dmax) return false;
        if (sc->kind == BundleKind::DoubleBundle) {
            if (b.d2 < -ops.nu_I(b.beta_s) || b.d2 > sc->box.d2) return false;
        } else if (b.d2 != 0) {
            return false;
        }
        return true;
    }

    std::vector<CurveClass> box_classes() const {
        CurveOps ops = sc->curves();
        std::vector<CurveClass> out;
        for (auto& bs : ops.enumerate_bases(sc->box.bs)) {
            int dlo = -ops.mu_I(bs) - sc->box.dmargin;
            int d2lo = sc->kind == BundleKind::DoubleBundle ? -ops.nu_I(bs) : 0;
            int d2hi = sc->kind == BundleKind::DoubleBundle ? sc->box.d2 : 0;
            for (int d2 = d2lo; d2 <= d2hi; ++d2)
                for (int d = dlo; d <= sc->box.dmax; ++d) out.push_back({bs, d, d2});
        }
        return out;
    }

    ZLaurent at(const CurveClass& b) const {
        auto it = terms.find(b);
        return it == terms.end() ? ZLaurent{} : it->second;
    }
};

inline SeriesI assemble_I(const Scenario& sc) {
    SeriesI I;
    I.sc = &sc;
    for (const CurveClass& b : I.box_classes()) {
        ZLaurent rel = relative_factor(sc, b);
        if (rel.is_zero()) continue;
        ZLaurent term = rel.mul(sc.alg(), base_j_factor(sc, b.beta_s));
        if (!term.is_zero()) I.terms[b] = std::move(term);
    }
    return I;
}

// Degree-0 homogeneity: each stored monomial T z^k q^beta satisfies
// deg T + k + c1(X).beta = 0.
inline bool check_homogeneity(const SeriesI& I, std::string* first_bad = nullptr) {
    CurveOps ops = I.sc->curves();
    const TotalAlgebra& A = I.alg();
    for (auto& [b, zl] : I.terms) {
        int cb = ops.c1X_dot(b);
        for (auto& [k, v] : zl.c)
            for (int eps = 0; eps < A.rank(); ++eps) {
                if (is_zero(v[eps])) continue;
                if (A.degree(eps) + k + cb != 0) {
                    if (first_bad)
                        *first_bad = A.basis_name(eps) + " z^" + std::to_string(k) +
                                     " at class d=" + std::to_string(b.d);
                    return false;
                }
            }
    }
    return true;
}

}  // namespace qlh

#endif
