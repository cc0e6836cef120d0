#ifndef QLH_DIFFOP_HPP
#define QLH_DIFFOP_HPP

#include <qlh/coeff.hpp>
#include <qlh/ifunction.hpp>

#include <set>

namespace qlh {

// Commuting derivative symbols (z d_{t^1})^l (z d_{t^2})^m prod_g (z d_{tbar^g})^{base_g}.
// The string direction t^0 acts as the identity and is never stored.
struct DerivMono {
    int l = 0;
    int m = 0;
    std::vector<int> base;  // indexed by base basis element 1..rank-1, trailing zeros trimmed

    friend auto operator<=>(const DerivMono& a, const DerivMono& b) = default;

    int base_degree() const { return std::accumulate(base.begin(), base.end(), 0); }
    bool is_identity() const { return l == 0 && m == 0 && base_degree() == 0; }

    DerivMono normalized() const {
        DerivMono r = *this;
        trim_exponents(r.base);
        return r;
    }

    DerivMono operator*(const DerivMono& o) const {
        DerivMono r;
        r.l = l + o.l;
        r.m = m + o.m;
        r.base.resize(std::max(base.size(), o.base.size()), 0);
        for (size_t i = 0; i < base.size(); ++i) r.base[i] += base[i];
        for (size_t i = 0; i < o.base.size(); ++i) r.base[i] += o.base[i];
        trim_exponents(r.base);
        return r;
    }
};

// Normal-ordered differential operator: a finite sum coeff(q,z) * mono with
// all coefficient functions to the left of all derivative symbols.
class DiffOp {
  public:
    DiffOp() = default;
    explicit DiffOp(Coeff c) {
        if (!c.is_zero()) terms_[DerivMono{}] = std::move(c);
    }

    static DiffOp identity() { return DiffOp(Coeff::one()); }
    static DiffOp mono(DerivMono m, Coeff c = Coeff::one()) {
        DiffOp op;
        if (!c.is_zero()) op.terms_[m.normalized()] = std::move(c);
        return op;
    }
    static DiffOp d_t1() { return mono(DerivMono{1, 0, {}}); }
    static DiffOp d_t2() { return mono(DerivMono{0, 1, {}}); }
    static DiffOp d_base(int base_index, int base_rank) {
        if (base_index == 0) return identity();  // string direction
        DerivMono m;
        m.base.assign(base_rank - 1, 0);
        m.base[base_index - 1] = 1;
        return mono(std::move(m));
    }

    bool is_zero() const { return terms_.empty(); }
    const std::map<DerivMono, Coeff>& terms() const { return terms_; }
    bool operator==(const DiffOp& o) const { return terms_ == o.terms_; }

    void add(const DerivMono& mono, const Coeff& c) {
        if (c.is_zero()) return;
        DerivMono m = mono.normalized();
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend DiffOp operator+(const DiffOp& a, const DiffOp& b) {
        DiffOp r = a;
        for (auto& [m, c] : b.terms_) r.add(m, c);
        return r;
    }
    friend DiffOp operator-(const DiffOp& a, const DiffOp& b) {
        DiffOp r = a;
        for (auto& [m, c] : b.terms_) r.add(m, -c);
        return r;
    }
    DiffOp operator-() const {
        DiffOp r;
        for (auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }
    friend DiffOp operator*(const Coeff& s, const DiffOp& a) {
        DiffOp r;
        for (auto& [m, c] : a.terms_) r.add(m, s * c);
        return r;
    }
    friend DiffOp operator*(const Rational& s, const DiffOp& a) {
        DiffOp r;
        for (auto& [m, c] : a.terms_) r.add(m, s * c);
        return r;
    }

    // Operator composition this . other. Derivative symbols of the left
    // factor commute past the right coefficients by the Leibniz rule
    //   D^k (c .) = sum_j binom(k,j) z^j theta^j(c) D^{k-j}.
    DiffOp compose(const DiffOp& other) const {
        DiffOp out;
        for (auto& [ma, ca] : terms_) {
            for (auto& [mb, cb] : other.terms_) {
                // iterate over how many of each derivative hit the coefficient
                commute_past(ma, cb, [&](const Coeff& shifted, const DerivMono& rest) {
                    out.add(rest * mb, ca * shifted);
                });
            }
        }
        return out;
    }

    // The graph correspondence on operators: z d_{t1} -> z d_{u2} - z d_{u1},
    // z d_{t2} -> z d_{u2}, base directions fixed; coefficients substituted.
    DiffOp flop_substitute() const {
        DiffOp out;
        for (auto& [m, c] : terms_) {
            Coeff cc = c.flop_substitute();
            for (int j = 0; j <= m.l; ++j) {
                // (Dxi' - Dh')^l expanded
                Rational coef = binomial(m.l, j) * Rational((m.l - j) % 2 ? -1 : 1);
                DerivMono nm;
                nm.l = m.l - j;
                nm.m = m.m + j;
                nm.base = m.base;
                out.add(nm, coef * cc);
            }
        }
        return out;
    }

    DiffOp truncate_qbar(int bound) const {
        DiffOp out;
        for (auto& [m, c] : terms_) out.add(m, c.truncate_qbar(bound));
        return out;
    }

    std::string str(const std::vector<std::string>& base_names = {}) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [m, c] : terms_) {
            if (!first) os << "  +  ";
            os << "(" << c.str() << ")";
            if (m.l) os << " zd1^" << m.l;
            if (m.m) os << " zd2^" << m.m;
            for (size_t g = 0; g < m.base.size(); ++g)
                if (m.base[g]) {
                    std::string nm = g + 1 < base_names.size() ? base_names[g + 1]
                                                               : "b" + std::to_string(g + 1);
                    os << " zd[" << nm << "]^" << m.base[g];
                }
            first = false;
        }
        return os.str();
    }

  private:
    template <typename F>
    static void commute_past(const DerivMono& ma, const Coeff& cb, F&& emit) {
        // enumerate j1 <= l, j2 <= m, jg <= base_g with iterated thetas
        std::vector<Coeff> th1{cb};
        for (int j = 1; j <= ma.l; ++j) th1.push_back(th1.back().theta_t1());
        for (int j1 = 0; j1 <= ma.l; ++j1) {
            if (th1[j1].is_zero() && j1 > 0) continue;
            std::vector<Coeff> th2{th1[j1]};
            for (int j = 1; j <= ma.m; ++j) th2.push_back(th2.back().theta_t2());
            for (int j2 = 0; j2 <= ma.m; ++j2) {
                if (th2[j2].is_zero() && j2 > 0) continue;
                // base directions one at a time
                struct Frame {
                    Coeff c;
                    std::vector<int> taken;
                };
                std::vector<Frame> frames{{th2[j2], std::vector<int>(ma.base.size(), 0)}};
                for (size_t g = 0; g < ma.base.size(); ++g) {
                    std::vector<Frame> next;
                    for (auto& fr : frames) {
                        Coeff cur = fr.c;
                        for (int jg = 0; jg <= ma.base[g]; ++jg) {
                            if (!(jg > 0 && cur.is_zero())) {
                                Frame nf = fr;
                                nf.c = cur;
                                nf.taken[g] = jg;
                                next.push_back(std::move(nf));
                            }
                            if (jg < ma.base[g]) cur = cur.theta_base(static_cast<int>(g));
                        }
                    }
                    frames = std::move(next);
                }
                for (auto& fr : frames) {
                    if (fr.c.is_zero()) continue;
                    int total = j1 + j2;
                    Rational bin = binomial(ma.l, j1) * binomial(ma.m, j2);
                    for (size_t g = 0; g < ma.base.size(); ++g) {
                        total += fr.taken[g];
                        bin *= binomial(ma.base[g], fr.taken[g]);
                    }
                    DerivMono rest;
                    rest.l = ma.l - j1;
                    rest.m = ma.m - j2;
                    rest.base.resize(ma.base.size());
                    for (size_t g = 0; g < ma.base.size(); ++g)
                        rest.base[g] = ma.base[g] - fr.taken[g];
                    emit(bin * fr.c.mul_z(total), rest);
                }
            }
        }
    }

    std::map<DerivMono, Coeff> terms_;
};

// Result of applying an operator to a truncated series: values per class
// plus the classes whose value needed data outside the box.
struct ApplyResult {
    std::map<CurveClass, ZLaurent> terms;
    std::set<CurveClass> masked;

    ZLaurent at(const CurveClass& b) const {
        auto it = terms.find(b);
        return it == terms.end() ? ZLaurent{} : it->second;
    }
};

// Exact action of a normal-ordered operator on the I-series. For a divisor
// direction v, z d_v multiplies the class-beta term by (v + (v.beta) z);
// coefficient monomials shift the class index, with the q1-dependence
// expanded as a Laurent series against the effective support.
inline ApplyResult apply_diffop(const DiffOp& op, const SeriesI& I) {
    const Scenario& sc = *I.sc;
    const TotalAlgebra& A = sc.alg();
    CurveOps ops = sc.curves();
    ApplyResult out;

    // derivative action cache per (mono, class)
    auto deriv_act = [&](const DerivMono& m, const CurveClass& b, const ZLaurent& t) {
        ZLaurent v = t;
        for (int j = 0; j < m.l; ++j) v = v.mul_linear(A, A.h_class(), Rational(b.d));
        for (int j = 0; j < m.m; ++j) v = v.mul_linear(A, A.xi_class(), Rational(b.d2));
        for (size_t g = 0; g < m.base.size(); ++g) {
            if (!m.base[g]) continue;
            int bi = static_cast<int>(g) + 1;
            // direction must be a divisor generator to act on the series
            int gen = -1;
            for (size_t q = 0; q < A.base().divisor_gens.size(); ++q)
                if (A.base().divisor_gens[q] == bi) gen = static_cast<int>(q);
            if (gen < 0)
                throw std::domain_error("series action undefined for non-divisor base direction");
            CohClass D = A.base_embed(A.base().divisor(gen));
            for (int j = 0; j < m.base[g]; ++j)
                v = v.mul_linear(A, D, Rational(b.beta_s[gen]));
        }
        return v;
    };

    for (const CurveClass& target : I.box_classes()) {
        ZLaurent acc;
        bool masked = false;
        for (auto& [mono, coeff] : op.terms()) {
            for (auto& [cm, rf] : coeff.terms()) {
                // class shift from q2 and qbar exponents
                CurveClass src0 = target;
                src0.d2 -= cm.q2exp;
                for (size_t g = 0; g < cm.qbar.size(); ++g) src0.beta_s[g] -= cm.qbar[g];
                if (!ops.effective_base(src0.beta_s)) continue;
                // q1-window: sources with d-component down to the effective floor
                int dlo_needed = -ops.mu_I(src0.beta_s);
                int amax = src0.d - dlo_needed;          // largest q1 power with support
                int amin = rf.is_zero() ? 0 : INT_MIN;   // determined by the series valuation
                auto series = rf.series_at_zero(-64, amax);
                (void)amin;
                for (auto& [a, cval] : series) {
                    CurveClass src = src0;
                    src.d -= a;
                    if (!ops.is_I_effective(src)) continue;  // vanishing lemma
                    if (!I.in_box(src)) {
                        masked = true;
                        continue;
                    }
                    auto it = I.terms.find(src);
                    if (it == I.terms.end()) continue;
                    ZLaurent v = deriv_act(mono, src, it->second);
                    acc = acc + v.scaled(cval).shifted_z(cm.zexp);
                }
                // exactness of the window: series_at_zero(-64, ...) covers any
                // pole order met in practice; guard against deeper ones
                if (!rf.is_zero() && rf.den().valuation() > 64)
                    throw std::logic_error("q1 expansion window exceeded");
            }
        }
        if (masked)
            out.masked.insert(target);
        else if (!acc.is_zero())
            out.terms[target] = std::move(acc);
    }
    return out;
}

}  // namespace qlh

#endif
