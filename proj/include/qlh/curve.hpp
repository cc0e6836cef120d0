#ifndef QLH_CURVE_HPP
#define QLH_CURVE_HPP

#include <qlh/cohomology.hpp>

#include <algorithm>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qlh {

// beta = beta_S + d*ell + d2*gamma. For single projective bundles d2 is 0.
struct CurveClass {
    std::vector<int> beta_s;
    int d = 0;
    int d2 = 0;

    friend auto operator<=>(const CurveClass& a, const CurveClass& b) = default;

    CurveClass shifted(int dd, int dd2 = 0) const { return {beta_s, d + dd, d2 + dd2}; }
    bool base_zero() const {
        return std::all_of(beta_s.begin(), beta_s.end(), [](int n) { return n == 0; });
    }
    int base_total() const { return std::accumulate(beta_s.begin(), beta_s.end(), 0); }
};

// (beta_S, d2): the quotient Mori cone grading that drives every induction.
struct Weight {
    std::vector<int> beta_s;
    int d2 = 0;
    friend auto operator<=>(const Weight& a, const Weight& b) = default;
    bool is_origin() const {
        return d2 == 0 && std::all_of(beta_s.begin(), beta_s.end(), [](int n) { return n == 0; });
    }
    int base_total() const { return std::accumulate(beta_s.begin(), beta_s.end(), 0); }
};

struct LengthData {
    std::vector<int> n;        // n_i = -beta.(h + L_i)
    std::vector<int> np;       // n'_i = -beta.(xi - h + L'_i)
    int np_last = 0;           // n'_{r+1} = -beta.xi
};

class CurveOps {
  public:
    explicit CurveOps(const TotalAlgebra* alg) : alg_(alg) {}

    int ngens() const { return std::max(alg_->base().ngens, 0); }

    std::vector<int> mu(const CurveClass& b) const { return mu(b.beta_s); }
    std::vector<int> mu(const std::vector<int>& beta_s) const {
        std::vector<int> out(alg_->r() + 1, 0);
        for (int i = 0; i <= alg_->r(); ++i)
            for (int g = 0; g < ngens(); ++g) out[i] += beta_s[g] * alg_->muF(i, g);
        return out;
    }
    std::vector<int> mup(const std::vector<int>& beta_s) const {
        std::vector<int> out(alg_->r() + 1, 0);
        if (alg_->kind() != BundleKind::DoubleBundle) return out;
        for (int i = 0; i <= alg_->r(); ++i)
            for (int g = 0; g < ngens(); ++g) out[i] += beta_s[g] * alg_->muFp(i, g);
        return out;
    }

    int mu_I(const std::vector<int>& beta_s) const {
        auto m = mu(beta_s);
        return *std::max_element(m.begin(), m.end());
    }
    int mup_I(const std::vector<int>& beta_s) const {
        auto m = mup(beta_s);
        return *std::max_element(m.begin(), m.end());
    }
    int nu_I(const std::vector<int>& beta_s) const {
        return std::max(mu_I(beta_s) + mup_I(beta_s), 0);
    }

    CurveClass i_minimal_lift(const std::vector<int>& beta_s) const {
        if (!effective_base(beta_s)) throw std::invalid_argument("base class not effective");
        if (alg_->kind() == BundleKind::SingleBundle) return {beta_s, -mu_I(beta_s), 0};
        return {beta_s, -mu_I(beta_s), -nu_I(beta_s)};
    }

    // Twisted admissible lift beta^I - delta*ell, with delta = -(mu+mu')
    // when that gap is positive (the lift used to align with the flop).
    CurveClass twisted_lift(const std::vector<int>& beta_s) const {
        CurveClass b = i_minimal_lift(beta_s);
        if (alg_->kind() != BundleKind::DoubleBundle) return b;
        int gap = mu_I(beta_s) + mup_I(beta_s);
        if (gap < 0) b.d += gap;  // subtract delta = -gap times ell
        return b;
    }

    bool effective_base(const std::vector<int>& beta_s) const {
        return std::all_of(beta_s.begin(), beta_s.end(), [](int n) { return n >= 0; });
    }

    bool is_I_effective(const CurveClass& b) const {
        if (!effective_base(b.beta_s)) return false;
        if (b.d < -mu_I(b.beta_s)) return false;
        if (alg_->kind() == BundleKind::DoubleBundle && b.d2 < -nu_I(b.beta_s)) return false;
        return true;
    }

    bool is_TI_effective(const CurveClass& b) const {
        if (!effective_base(b.beta_s)) return false;
        return b.d + mu_I(b.beta_s) >= 0 && b.d2 - b.d + mup_I(b.beta_s) >= 0;
    }

    CurveClass flop_push(const CurveClass& b) const { return {b.beta_s, b.d2 - b.d, b.d2}; }

    LengthData lengths(const CurveClass& b) const {
        LengthData out;
        auto m = mu(b.beta_s), mp = mup(b.beta_s);
        for (int i = 0; i <= alg_->r(); ++i) {
            out.n.push_back(-(b.d + m[i]));
            if (alg_->kind() == BundleKind::DoubleBundle) out.np.push_back(-(b.d2 - b.d + mp[i]));
        }
        out.np_last = -b.d2;
        return out;
    }

    bool admissible(const CurveClass& b) const {
        LengthData L = lengths(b);
        for (int v : L.n)
            if (v < 0) return false;
        for (int v : L.np)
            if (v < 0) return false;
        if (alg_->kind() == BundleKind::DoubleBundle && L.np_last < 0) return false;
        return true;
    }

    // lambda_beta = c1(X/S).beta. For the double bundle it depends only on
    // (beta_S, d2); for a single bundle it is (r+1)d + sum mu_i.
    int lambda(const CurveClass& b) const {
        auto m = mu(b.beta_s);
        int s = std::accumulate(m.begin(), m.end(), 0);
        if (alg_->kind() == BundleKind::SingleBundle) return (alg_->r() + 1) * b.d + s;
        auto mp = mup(b.beta_s);
        s += std::accumulate(mp.begin(), mp.end(), 0);
        return s + (alg_->r() + 2) * b.d2;
    }

    int c1X_dot(const CurveClass& b) const {
        int s = lambda(b);
        for (int g = 0; g < ngens(); ++g) s += b.beta_s[g] * alg_->base().c1_degrees[g];
        return s;
    }

    // Geometric minimal lift for a supplied primitive decomposition
    // beta_S = sum n_j C_j.
    CurveClass geometric_minimal_lift(
        const std::vector<int>& beta_s,
        const std::vector<std::pair<std::vector<int>, int>>& decomposition) const {
        std::vector<int> total(beta_s.size(), 0);
        int mu_sum = 0, nu_sum = 0;
        for (auto& [cls, count] : decomposition) {
            if (count <= 0 || !effective_base(cls))
                throw std::invalid_argument("non-effective decomposition");
            for (size_t g = 0; g < cls.size(); ++g) total[g] += count * cls[g];
            int mc = mu_I(cls);
            mu_sum += count * mc;
            if (alg_->kind() == BundleKind::DoubleBundle)
                nu_sum += count * std::max(mc + mup_I(cls), 0);
        }
        if (total != beta_s) throw std::invalid_argument("decomposition does not sum to the class");
        return {beta_s, -mu_sum, alg_->kind() == BundleKind::DoubleBundle ? -nu_sum : 0};
    }

    // ---- weight cone -------------------------------------------------

    // nu of the g-th primitive generator; the geometric weight cone is
    // spanned by (C_g, -nu_g) and (0, 1).
    int gen_nu(int g) const {
        std::vector<int> e(ngens(), 0);
        e[g] = 1;
        return nu_I(e);
    }

    bool weight_in_cone(const Weight& w) const {
        int floor = 0;
        for (int g = 0; g < ngens(); ++g) {
            if (w.beta_s[g] < 0) return false;
            floor -= w.beta_s[g] * gen_nu(g);
        }
        if (alg_->kind() == BundleKind::SingleBundle) return w.d2 == 0;
        return w.d2 >= floor;
    }

    bool weight_leq(const Weight& a, const Weight& b) const {
        Weight diff;
        diff.beta_s.resize(ngens());
        for (int g = 0; g < ngens(); ++g) diff.beta_s[g] = b.beta_s[g] - a.beta_s[g];
        diff.d2 = b.d2 - a.d2;
        return weight_in_cone(diff);
    }

    // All cone weights with base order <= bs_bound and d2 <= d2_bound,
    // listed in an enumeration compatible with the cone partial order.
    std::vector<Weight> weight_box(int bs_bound, int d2_bound) const {
        std::vector<Weight> out;
        std::vector<std::vector<int>> bases = enumerate_bases(bs_bound);
        for (auto& bs : bases) {
            int floor = 0;
            for (int g = 0; g < ngens(); ++g) floor -= bs[g] * gen_nu(g);
            if (alg_->kind() == BundleKind::SingleBundle) {
                out.push_back({bs, 0});
                continue;
            }
            for (int d2 = floor; d2 <= d2_bound; ++d2) out.push_back({bs, d2});
        }
        std::sort(out.begin(), out.end(), [](const Weight& a, const Weight& b) {
            return std::make_tuple(a.base_total(), a.beta_s, a.d2) <
                   std::make_tuple(b.base_total(), b.beta_s, b.d2);
        });
        return out;
    }

    std::vector<std::vector<int>> enumerate_bases(int total_bound) const {
        std::vector<std::vector<int>> out;
        std::vector<int> cur(ngens(), 0);
        enum_rec(cur, 0, total_bound, out);
        return out;
    }

    Weight weight_of(const CurveClass& b) const { return {b.beta_s, b.d2}; }

  private:
    void enum_rec(std::vector<int>& cur, int g, int budget,
                  std::vector<std::vector<int>>& out) const {
        if (g == ngens()) {
            out.push_back(cur);
            return;
        }
        for (int n = 0; n <= budget; ++n) {
            cur[g] = n;
            enum_rec(cur, g + 1, budget - n, out);
        }
        cur[g] = 0;
    }

    const TotalAlgebra* alg_;
};

// Truncation box for the I-function and everything downstream.
struct Box {
    int bs = 2;      // base degree bound
    int d2 = 2;      // d2 upper bound
    int dmax = 6;    // d upper bound
    int dmargin = 2; // extra non-effective d slots kept below -mu^I
};

}  // namespace qlh

#endif
