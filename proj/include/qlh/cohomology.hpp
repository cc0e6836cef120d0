#ifndef QLH_COHOMOLOGY_HPP
#define QLH_COHOMOLOGY_HPP

#include <qlh/rational.hpp>

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace qlh {

using CohClass = std::vector<Rational>;

inline CohClass coh_add(const CohClass& a, const CohClass& b) {
    CohClass r(std::max(a.size(), b.size()), Rational(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}
inline CohClass coh_scale(const Rational& s, const CohClass& a) {
    CohClass r(a);
    for (auto& c : r) c *= s;
    return r;
}
inline bool coh_is_zero(const CohClass& a) {
    for (auto& c : a)
        if (!is_zero(c)) return false;
    return true;
}

// QDE structure constant entry for the base: z*d_i z*d_j J^S contains
// C q^{beta_bar} z*d_k J^S.
struct BaseQdeEntry {
    int i, j, k;
    std::vector<int> beta_bar;
    Rational value;
};

// H(S) with a fixed graded basis, structure constants and integral.
struct BaseAlgebra {
    std::string id;
    int rank = 1;
    int dim = 0;  // complex dimension of S
    std::vector<std::string> names;
    std::vector<int> degrees;                        // Chow degree per basis element
    std::vector<std::vector<CohClass>> mult;         // mult[i][j]
    std::vector<Rational> integral;                  // linear functional on the basis
    std::vector<int> divisor_gens;                   // basis indices dual to the curve generators
    int ngens = 0;                                   // number of base curve generators
    std::vector<int> c1_degrees;                     // c1(S) . (curve generator g)
    std::vector<BaseQdeEntry> qde;                   // quantum corrections (beta_bar != 0) and cup products

    static BaseAlgebra point() {
        BaseAlgebra b;
        b.id = "point";
        b.rank = 1;
        b.dim = 0;
        b.names = {"1"};
        b.degrees = {0};
        b.mult = {{CohClass{Rational(1)}}};
        b.integral = {Rational(1)};
        b.ngens = 0;
        return b;
    }

    static BaseAlgebra p1() {
        BaseAlgebra b;
        b.id = "p1";
        b.rank = 2;
        b.dim = 1;
        b.names = {"1", "p"};
        b.degrees = {0, 1};
        b.mult.assign(2, std::vector<CohClass>(2));
        b.mult[0][0] = CohClass{Rational(1), Rational(0)};
        b.mult[0][1] = CohClass{Rational(0), Rational(1)};
        b.mult[1][0] = CohClass{Rational(0), Rational(1)};
        b.mult[1][1] = CohClass{Rational(0), Rational(0)};  // p^2 = 0
        b.integral = {Rational(0), Rational(1)};
        b.divisor_gens = {1};
        b.ngens = 1;
        b.c1_degrees = {2};
        // (z d_p)^2 J = qbar J  (small quantum cohomology of P^1)
        b.qde = {BaseQdeEntry{1, 1, 0, {1}, Rational(1)}};
        return b;
    }

    CohClass zero() const { return CohClass(rank, Rational(0)); }
    CohClass unit() const {
        CohClass c = zero();
        c[0] = 1;
        return c;
    }
    CohClass basis_class(int i) const {
        CohClass c = zero();
        c[i] = 1;
        return c;
    }

    CohClass mul_classes(const CohClass& a, const CohClass& b) const {
        CohClass r = zero();
        for (int i = 0; i < rank; ++i) {
            if (is_zero(a[i])) continue;
            for (int j = 0; j < rank; ++j) {
                if (is_zero(b[j])) continue;
                Rational s = a[i] * b[j];
                for (int k = 0; k < rank; ++k) r[k] += s * mult[i][j][k];
            }
        }
        return r;
    }

    Rational integrate(const CohClass& a) const {
        Rational s(0);
        for (int i = 0; i < rank; ++i) s += a[i] * integral[i];
        return s;
    }

    // Divisor class pairing generator g with weight 1 (dual basis element).
    CohClass divisor(int g) const { return basis_class(divisor_gens.at(g)); }

    // A divisor class from intersection degrees against the curve generators.
    CohClass divisor_from_degrees(const std::vector<int>& deg) const {
        CohClass c = zero();
        for (int g = 0; g < ngens; ++g) c = coh_add(c, coh_scale(Rational(deg[g]), divisor(g)));
        return c;
    }
};

enum class BundleKind { SingleBundle, DoubleBundle };

// H(X) for the local models. DoubleBundle is
// H(S)[h,xi]/(prod (h+L_i), xi prod (xi-h+L'_i)); SingleBundle is the plain
// projective bundle H(S)[h]/(prod (h+L_i)).
class TotalAlgebra {
  public:
    struct BasisElem {
        int base_i;
        int l;  // h power
        int m;  // xi power
    };

    TotalAlgebra() = default;

    TotalAlgebra(BundleKind kind, BaseAlgebra base, int r,
                 std::vector<std::vector<int>> deg_F, std::vector<std::vector<int>> deg_Fp)
        : kind_(kind), base_(std::move(base)), r_(r), degF_(std::move(deg_F)), degFp_(std::move(deg_Fp)) {
        build_basis();
        build_relations();
        build_mult_cache();
        build_pairing();
    }

    BundleKind kind() const { return kind_; }
    const BaseAlgebra& base() const { return base_; }
    int r() const { return r_; }
    int rank() const { return static_cast<int>(basis_.size()); }
    int max_l() const { return r_; }
    int max_m() const { return kind_ == BundleKind::DoubleBundle ? r_ + 1 : 0; }
    int dim() const {
        return base_.dim + r_ + (kind_ == BundleKind::DoubleBundle ? r_ + 1 : 0);
    }
    const std::vector<BasisElem>& basis() const { return basis_; }
    int degree(int eps) const {
        const auto& b = basis_[eps];
        return base_.degrees[b.base_i] + b.l + b.m;
    }
    int index_of(int base_i, int l, int m) const { return index_.at(std::make_tuple(base_i, l, m)); }

    // bundle degree accessors: c1(L_i).C_g
    int muF(int i, int g) const { return degF_[i][g]; }
    int muFp(int i, int g) const { return degFp_[i][g]; }

    CohClass zero() const { return CohClass(rank(), Rational(0)); }
    CohClass unit() const { return basis_class(0); }
    CohClass basis_class(int eps) const {
        CohClass c = zero();
        c[eps] = 1;
        return c;
    }
    CohClass h_class() const { return basis_class(index_of(0, 1, 0)); }
    CohClass xi_class() const { return basis_class(index_of(0, 0, 1)); }
    CohClass base_embed(const CohClass& bc) const {
        CohClass c = zero();
        for (int i = 0; i < base_.rank; ++i) c[index_of(i, 0, 0)] = bc[i];
        return c;
    }
    CohClass L_class(int i) const {  // c1(L_i) as a class on X
        return base_embed(base_.divisor_from_degrees(degF_[i]));
    }
    CohClass Lp_class(int i) const { return base_embed(base_.divisor_from_degrees(degFp_[i])); }

    CohClass mul(const CohClass& a, const CohClass& b) const {
        CohClass r = zero();
        for (int i = 0; i < rank(); ++i) {
            if (is_zero(a[i])) continue;
            for (int j = 0; j < rank(); ++j) {
                if (is_zero(b[j])) continue;
                Rational s = a[i] * b[j];
                const CohClass& mij = mult_cache_[i][j];
                for (int k = 0; k < rank(); ++k) r[k] += s * mij[k];
            }
        }
        return r;
    }

    CohClass pow(const CohClass& a, int e) const {
        CohClass acc = unit();
        for (int i = 0; i < e; ++i) acc = mul(acc, a);
        return acc;
    }

    // Integration over X: only top-degree base coefficients of h^r xi^{m_top}
    // survive (push-forward of the top fiber powers is 1).
    Rational integrate(const CohClass& a) const {
        Rational s(0);
        int mt = max_m();
        for (int i = 0; i < base_.rank; ++i) {
            int eps = index_of(i, r_, mt);
            if (!is_zero(a[eps])) s += a[eps] * base_.integral[i];
        }
        return s;
    }

    Rational pairing(const CohClass& a, const CohClass& b) const { return integrate(mul(a, b)); }

    const std::vector<std::vector<Rational>>& pairing_matrix() const { return gram_; }
    const std::vector<std::vector<Rational>>& pairing_inverse() const { return gram_inv_; }

    // Dual basis element T^eps = sum_k g^{eps k} T_k.
    CohClass dual_basis_class(int eps) const {
        CohClass c = zero();
        for (int k = 0; k < rank(); ++k) c[k] = gram_inv_[eps][k];
        return c;
    }

    // Reduce a raw monomial combination (base_i, l, m) -> coeff into the
    // canonical basis, rewriting h powers through f_F and xi powers through
    // f_{N+O}. The two relations have no stated rewriting order; both
    // strategies terminate and must agree, which the tests assert.
    CohClass normal_form(const std::map<std::tuple<int, int, int>, Rational>& raw,
                         bool h_priority = false) const {
        std::map<std::tuple<int, int, int>, Rational> work(raw);
        CohClass out = zero();
        while (!work.empty()) {
            auto best = work.begin();
            for (auto jt = work.begin(); jt != work.end(); ++jt) {
                auto [bi, bl, bm] = best->first;
                auto [ji, jl, jm] = jt->first;
                auto kb = h_priority ? std::make_tuple(bl, bm, bi) : std::make_tuple(bm, bl, bi);
                auto kj = h_priority ? std::make_tuple(jl, jm, ji) : std::make_tuple(jm, jl, ji);
                if (kj > kb) best = jt;
            }
            auto [i, l, m] = best->first;
            Rational c = best->second;
            work.erase(best);
            if (is_zero(c)) continue;
            bool reduce_h = l > max_l() && (h_priority || m <= max_m());
            if (m > max_m() && !reduce_h) {
                // xi^m -> -sum_k ek(L'-h) xi^{m-k}, ek as polynomials in h
                for (size_t k = 1; k < xi_rule_.size(); ++k) {
                    for (size_t hj = 0; hj < xi_rule_[k].size(); ++hj) {
                        const CohClass& bc = xi_rule_[k][hj];
                        for (int bi2 = 0; bi2 < base_.rank; ++bi2) {
                            if (is_zero(bc[bi2])) continue;
                            // base product T_i * T_bi2
                            const CohClass& pr = base_.mult[i][bi2];
                            for (int bi3 = 0; bi3 < base_.rank; ++bi3) {
                                if (is_zero(pr[bi3])) continue;
                                work[std::make_tuple(bi3, l + static_cast<int>(hj),
                                                     m - static_cast<int>(k))] +=
                                    -c * bc[bi2] * pr[bi3];
                            }
                        }
                    }
                }
            } else if (reduce_h) {
                for (size_t k = 1; k < h_rule_.size(); ++k) {
                    const CohClass& bc = h_rule_[k];
                    for (int bi2 = 0; bi2 < base_.rank; ++bi2) {
                        if (is_zero(bc[bi2])) continue;
                        const CohClass& pr = base_.mult[i][bi2];
                        for (int bi3 = 0; bi3 < base_.rank; ++bi3) {
                            if (is_zero(pr[bi3])) continue;
                            work[std::make_tuple(bi3, l - static_cast<int>(k), m)] +=
                                -c * bc[bi2] * pr[bi3];
                        }
                    }
                }
            } else {
                out[index_of(i, l, m)] += c;
            }
        }
        return out;
    }

    std::string basis_name(int eps) const {
        const auto& b = basis_[eps];
        std::string s;
        if (b.base_i != 0) s += base_.names[b.base_i];
        auto app = [&s](const std::string& v, int e) {
            if (e == 0) return;
            if (!s.empty()) s += "*";
            s += v;
            if (e > 1) s += "^" + std::to_string(e);
        };
        app("h", b.l);
        app("xi", b.m);
        if (s.empty()) s = "1";
        return s;
    }

  private:
    void build_basis() {
        // order: total degree asc, then h power desc, then xi power desc,
        // then base index asc. This matches the worked examples' layout.
        struct Key {
            int deg, l, m, i;
        };
        std::vector<std::pair<Key, BasisElem>> all;
        int mt = max_m();
        for (int i = 0; i < base_.rank; ++i)
            for (int l = 0; l <= r_; ++l)
                for (int m = 0; m <= mt; ++m)
                    all.push_back({{base_.degrees[i] + l + m, l, m, i}, {i, l, m}});
        std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
            auto ka = std::make_tuple(a.first.deg, -a.first.l, -a.first.m, a.first.i);
            auto kb = std::make_tuple(b.first.deg, -b.first.l, -b.first.m, b.first.i);
            return ka < kb;
        });
        for (auto& [k, e] : all) basis_.push_back(e);
        for (int eps = 0; eps < rank(); ++eps)
            index_[std::make_tuple(basis_[eps].base_i, basis_[eps].l, basis_[eps].m)] = eps;
    }

    // elementary symmetric classes of {c1(L_i)} and h-polynomials for
    // {c1(L'_i) - h}
    void build_relations() {
        // h rule: h^{r+1} = -sum_{k>=1} e_k(L) h^{r+1-k}
        std::vector<CohClass> ek(r_ + 2, base_.zero());
        ek[0] = base_.unit();
        for (int i = 0; i <= r_; ++i) {
            CohClass li = base_.divisor_from_degrees(degF_[i]);
            for (int k = std::min(i + 1, r_ + 1); k >= 1; --k)
                ek[k] = coh_add(ek[k], base_.mul_classes(ek[k - 1], li));
        }
        h_rule_ = ek;

        if (kind_ == BundleKind::DoubleBundle) {
            // xi * prod(xi - h + L'_i): coefficients of xi^{r+2-k} are
            // e_k(L'_0 - h, ..., L'_r - h), polynomials in h over H(S).
            // xi_rule_[k][hj] = base class at h^hj.
            int n = r_ + 1;
            std::vector<std::vector<CohClass>> e(n + 1);
            e[0] = {base_.unit()};
            for (int i = 0; i < n; ++i) {
                CohClass lpi = base_.divisor_from_degrees(degFp_[i]);
                for (int k = std::min(i + 1, n); k >= 1; --k) {
                    // e[k] += e[k-1] * (L'_i - h)
                    std::vector<CohClass> add(e[k - 1].size() + 1, base_.zero());
                    for (size_t hj = 0; hj < e[k - 1].size(); ++hj) {
                        add[hj] = coh_add(add[hj], base_.mul_classes(e[k - 1][hj], lpi));
                        add[hj + 1] = coh_add(add[hj + 1], coh_scale(Rational(-1), e[k - 1][hj]));
                    }
                    if (e[k].size() < add.size()) e[k].resize(add.size(), base_.zero());
                    for (size_t hj = 0; hj < add.size(); ++hj) e[k][hj] = coh_add(e[k][hj], add[hj]);
                }
            }
            xi_rule_ = std::move(e);
        }
    }

    void build_mult_cache() {
        int n = rank();
        mult_cache_.assign(n, std::vector<CohClass>(n));
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const auto& ea = basis_[a];
                const auto& eb = basis_[b];
                std::map<std::tuple<int, int, int>, Rational> raw;
                const CohClass& pr = base_.mult[ea.base_i][eb.base_i];
                for (int i = 0; i < base_.rank; ++i)
                    if (!is_zero(pr[i]))
                        raw[std::make_tuple(i, ea.l + eb.l, ea.m + eb.m)] += pr[i];
                mult_cache_[a][b] = normal_form(raw);
            }
        }
    }

    void build_pairing() {
        int n = rank();
        gram_.assign(n, std::vector<Rational>(n, Rational(0)));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) gram_[a][b] = integrate(mult_cache_[a][b]);
        // invert by Gauss-Jordan over Q
        gram_inv_.assign(n, std::vector<Rational>(n, Rational(0)));
        std::vector<std::vector<Rational>> m(gram_);
        for (int i = 0; i < n; ++i) gram_inv_[i][i] = 1;
        for (int col = 0; col < n; ++col) {
            int piv = -1;
            for (int row = col; row < n; ++row)
                if (!is_zero(m[row][col])) {
                    piv = row;
                    break;
                }
            if (piv < 0) throw std::logic_error("degenerate Poincare pairing");
            std::swap(m[piv], m[col]);
            std::swap(gram_inv_[piv], gram_inv_[col]);
            Rational inv = Rational(1) / m[col][col];
            for (int j = 0; j < n; ++j) {
                m[col][j] *= inv;
                gram_inv_[col][j] *= inv;
            }
            for (int row = 0; row < n; ++row) {
                if (row == col || is_zero(m[row][col])) continue;
                Rational f = m[row][col];
                for (int j = 0; j < n; ++j) {
                    m[row][j] -= f * m[col][j];
                    gram_inv_[row][j] -= f * gram_inv_[col][j];
                }
            }
        }
    }

    BundleKind kind_ = BundleKind::DoubleBundle;
    BaseAlgebra base_;
    int r_ = 1;
    std::vector<std::vector<int>> degF_, degFp_;
    std::vector<BasisElem> basis_;
    std::map<std::tuple<int, int, int>, int> index_;
    std::vector<CohClass> h_rule_;                  // e_k(L) base classes
    std::vector<std::vector<CohClass>> xi_rule_;    // e_k(L'-h) as h-polynomials
    std::vector<std::vector<CohClass>> mult_cache_;
    std::vector<std::vector<Rational>> gram_, gram_inv_;
};

// Graph correspondence on cohomology: h -> xi' - h', xi -> xi', base fixed.
// Linear but not a ring map; values land in the flop partner algebra.
inline CohClass flop_map(const TotalAlgebra& src, const TotalAlgebra& dst, const CohClass& a) {
    CohClass out = dst.zero();
    CohClass xmh = coh_add(dst.xi_class(), coh_scale(Rational(-1), dst.h_class()));
    for (int eps = 0; eps < src.rank(); ++eps) {
        if (is_zero(a[eps])) continue;
        const auto& b = src.basis()[eps];
        CohClass img = dst.base_embed(src.base().basis_class(b.base_i));
        img = dst.mul(img, dst.pow(xmh, b.l));
        img = dst.mul(img, dst.pow(dst.xi_class(), b.m));
        out = coh_add(out, coh_scale(a[eps], img));
    }
    return out;
}

}  // namespace qlh

#endif
