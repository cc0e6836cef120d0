#ifndef QLH_COEFF_HPP
#define QLH_COEFF_HPP

#include <qlh/ratfunc.hpp>

#include <climits>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

namespace qlh {

// strip trailing zero exponents so equal monomials compare equal
inline void trim_exponents(std::vector<int>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}

// Exponent part of a coefficient monomial: z^zexp * q2^q2exp * qbar^qbar.
// q1-dependence is not part of the key; it lives in the RatFunc value, so
// inversion q1 -> 1/q1 stays exact.
struct CoeffMono {
    int zexp = 0;
    int q2exp = 0;
    std::vector<int> qbar;  // one slot per base curve generator, trailing zeros trimmed

    friend auto operator<=>(const CoeffMono& a, const CoeffMono& b) = default;

    int qbar_order() const { return std::accumulate(qbar.begin(), qbar.end(), 0); }

    CoeffMono normalized() const {
        CoeffMono r = *this;
        trim_exponents(r.qbar);
        return r;
    }

    CoeffMono operator*(const CoeffMono& o) const {
        CoeffMono r;
        r.zexp = zexp + o.zexp;
        r.q2exp = q2exp + o.q2exp;
        r.qbar.resize(std::max(qbar.size(), o.qbar.size()), 0);
        for (size_t i = 0; i < qbar.size(); ++i) r.qbar[i] += qbar[i];
        for (size_t i = 0; i < o.qbar.size(); ++i) r.qbar[i] += o.qbar[i];
        trim_exponents(r.qbar);
        return r;
    }

    std::string key() const {
        std::ostringstream os;
        os << "z^" << zexp << ";q2^" << q2exp << ";qb^";
        for (size_t i = 0; i < qbar.size(); ++i) {
            if (i) os << ",";
            os << qbar[i];
        }
        if (qbar.empty()) os << "0";
        return os.str();
    }
};

// Element of the coefficient ring: finite sum of monomials with RatFunc(q1)
// coefficients. No zero values are stored, so equality is structural.
class Coeff {
  public:
    Coeff() = default;
    explicit Coeff(Rational c) {
        if (!qlh::is_zero(c)) terms_[CoeffMono{}] = RatFunc(std::move(c));
    }
    explicit Coeff(RatFunc f) {
        if (!f.is_zero()) terms_[CoeffMono{}] = std::move(f);
    }

    static Coeff one() { return Coeff(Rational(1)); }
    static Coeff term(CoeffMono m, RatFunc f) {
        Coeff c;
        if (!f.is_zero()) c.terms_[m.normalized()] = std::move(f);
        return c;
    }
    static Coeff z(int power = 1) { return term(CoeffMono{power, 0, {}}, RatFunc(Rational(1))); }
    static Coeff q1(int power = 1) {
        return term(CoeffMono{}, power >= 0 ? RatFunc(Poly::x(power))
                                            : RatFunc(Poly(Rational(1)), Poly::x(-power)));
    }
    static Coeff q2(int power = 1) { return term(CoeffMono{0, power, {}}, RatFunc(Rational(1))); }
    static Coeff qbar(int gen, int power, int ngens) {
        CoeffMono m;
        m.qbar.assign(ngens, 0);
        m.qbar[gen] = power;
        return term(std::move(m), RatFunc(Rational(1)));
    }

    bool is_zero() const { return terms_.empty(); }
    bool operator==(const Coeff& o) const { return terms_ == o.terms_; }
    const std::map<CoeffMono, RatFunc>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    void add(const CoeffMono& mono, const RatFunc& f) {
        if (f.is_zero()) return;
        CoeffMono m = mono.normalized();
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = f;
        } else {
            it->second += f;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend Coeff operator+(const Coeff& a, const Coeff& b) {
        Coeff r = a;
        for (auto& [m, f] : b.terms_) r.add(m, f);
        return r;
    }
    friend Coeff operator-(const Coeff& a, const Coeff& b) {
        Coeff r = a;
        for (auto& [m, f] : b.terms_) r.add(m, -f);
        return r;
    }
    Coeff operator-() const {
        Coeff r;
        for (auto& [m, f] : terms_) r.terms_[m] = -f;
        return r;
    }
    friend Coeff operator*(const Coeff& a, const Coeff& b) {
        Coeff r;
        for (auto& [ma, fa] : a.terms_)
            for (auto& [mb, fb] : b.terms_) r.add(ma * mb, fa * fb);
        return r;
    }
    friend Coeff operator*(const Rational& s, const Coeff& a) {
        Coeff r;
        if (qlh::is_zero(s)) return r;
        for (auto& [m, f] : a.terms_) r.terms_[m] = RatFunc(s) * f;
        return r;
    }
    friend Coeff operator*(const RatFunc& s, const Coeff& a) {
        Coeff r;
        if (s.is_zero()) return r;
        for (auto& [m, f] : a.terms_) r.terms_[m] = s * f;
        return r;
    }
    Coeff& operator+=(const Coeff& o) {
        for (auto& [m, f] : o.terms_) add(m, f);
        return *this;
    }
    Coeff& operator-=(const Coeff& o) {
        for (auto& [m, f] : o.terms_) add(m, -f);
        return *this;
    }
    Coeff& operator*=(const Coeff& o) { return *this = *this * o; }

    // Euler derivations q d/dq in each grouped variable. These implement
    // the commutation z*d_a (c .) = (c) z*d_a + z theta_a(c).
    Coeff theta_t1() const {
        Coeff r;
        for (auto& [m, f] : terms_) r.add(m, f.theta());
        return r;
    }
    Coeff theta_t2() const {
        Coeff r;
        for (auto& [m, f] : terms_) r.add(m, RatFunc(Rational(m.q2exp)) * f);
        return r;
    }
    Coeff theta_base(int gen) const {
        Coeff r;
        for (auto& [m, f] : terms_) {
            int w = gen < static_cast<int>(m.qbar.size()) ? m.qbar[gen] : 0;
            r.add(m, RatFunc(Rational(w)) * f);
        }
        return r;
    }

    Coeff mul_z(int k) const {
        Coeff r;
        for (auto& [m, f] : terms_) {
            CoeffMono mm = m;
            mm.zexp += k;
            r.terms_[mm] = f;
        }
        return r;
    }

    // The graph correspondence on coefficients: q1 -> 1/q1', q2 -> q1' q2',
    // qbar -> qbar'. Exact because q1 lives in a rational function field.
    Coeff flop_substitute() const {
        Coeff r;
        for (auto& [m, f] : terms_) {
            RatFunc g = f.substitute_inverse();
            int n = m.q2exp;
            RatFunc q1pow = n >= 0 ? RatFunc(Poly::x(n)) : RatFunc(Poly(Rational(1)), Poly::x(-n));
            r.add(m, q1pow * g);
        }
        return r;
    }

    Coeff truncate_qbar(int bound) const {
        Coeff r;
        for (auto& [m, f] : terms_)
            if (m.qbar_order() <= bound) r.terms_[m] = f;
        return r;
    }

    // Part of the element with the given (qbar, q2) weight.
    Coeff weight_part(const std::vector<int>& qbar, int q2) const {
        Coeff r;
        for (auto& [m, f] : terms_) {
            std::vector<int> mb = m.qbar;
            mb.resize(std::max(mb.size(), qbar.size()), 0);
            std::vector<int> wb = qbar;
            wb.resize(mb.size(), 0);
            if (mb == wb && m.q2exp == q2) r.terms_[m] = f;
        }
        return r;
    }

    Coeff z_coefficient(int k) const {  // drops the z power
        Coeff r;
        for (auto& [m, f] : terms_)
            if (m.zexp == k) {
                CoeffMono mm = m;
                mm.zexp = 0;
                r.terms_[mm] = f;
            }
        return r;
    }

    int max_zexp() const {
        int k = INT_MIN;
        for (auto& [m, f] : terms_) k = std::max(k, m.zexp);
        return k;
    }

    bool z_free() const {
        for (auto& [m, f] : terms_)
            if (m.zexp != 0) return false;
        return true;
    }

    bool novikov_free() const {
        for (auto& [m, f] : terms_)
            if (m.q2exp != 0 || m.qbar_order() != 0 || !f.is_constant()) return false;
        return true;
    }

    // Constant term: the coefficient at the trivial monomial with all
    // Novikov variables set to zero (q1 -> 0 included).
    Rational constant_term() const {
        auto it = terms_.find(CoeffMono{});
        if (it == terms_.end()) return Rational(0);
        auto s = it->second.series_at_zero(0, 0);
        auto c = s.find(0);
        return c == s.end() ? Rational(0) : c->second;
    }

    // Membership in Q[z, q2, qbar, q1, f(q1)] per Theorem q-LH(3):
    // non-negative q2/qbar exponents and q1-poles only at the f pole.
    bool in_qlh_coefficient_ring(int r) const {
        for (auto& [m, f] : terms_) {
            if (m.q2exp < 0 || m.zexp < 0) return false;
            for (int e : m.qbar)
                if (e < 0) return false;
            if (!f.in_poly_ring_with_f(r)) return false;
        }
        return true;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [m, f] : terms_) {
            if (!first) os << " + ";
            os << "(" << f.str("q1") << ")";
            if (m.zexp) os << "*z^" << m.zexp;
            if (m.q2exp) os << "*q2^" << m.q2exp;
            for (size_t g = 0; g < m.qbar.size(); ++g)
                if (m.qbar[g]) os << "*qb" << g << "^" << m.qbar[g];
            first = false;
        }
        return os.str();
    }

  private:
    std::map<CoeffMono, RatFunc> terms_;
};

}  // namespace qlh

#endif
