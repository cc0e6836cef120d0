#ifndef QLH_RATFUNC_HPP
#define QLH_RATFUNC_HPP

#include <qlh/poly.hpp>

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qlh {

// Univariate rational function over Rational in canonical reduced form:
// numerator and denominator coprime, denominator monic. Equality is
// structural, which makes it bit-exact for golden comparisons.
class RatFunc {
  public:
    RatFunc() : num_(), den_{Rational(1)} {}
    RatFunc(Rational c) : num_(std::move(c)), den_{Rational(1)} {}
    RatFunc(long c) : num_(Rational(c)), den_{Rational(1)} {}
    RatFunc(Poly n) : num_(std::move(n)), den_{Rational(1)} {}
    RatFunc(Poly n, Poly d) : num_(std::move(n)), den_(std::move(d)) { reduce(); }

    static RatFunc x() { return RatFunc(Poly::x()); }

    // f(q) = q / (1 - (-1)^{r+1} q), the basic rational function whose
    // identity f(q) + f(1/q) = (-1)^r drives analytic continuation.
    static RatFunc f_basic(int r) {
        long sigma = (r % 2 == 0) ? -1 : 1;  // (-1)^{r+1}
        return RatFunc(Poly::x(), Poly(std::vector<Rational>{Rational(1), Rational(-sigma)}));
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_.degree() == 0; }

    Rational constant_value() const {
        if (!is_constant()) throw std::domain_error("not a constant");
        return num_[0] / den_[0];
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw std::domain_error("rational function division by zero");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }
    RatFunc operator-() const {
        RatFunc r(*this);
        r.num_ = -r.num_;
        return r;
    }
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }
    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }

    // g(x) = f(1/x), cleared back into reduced rational form.
    RatFunc substitute_inverse() const {
        int n = std::max(num_.degree(), den_.degree());
        if (n < 0) return *this;
        Poly nn = num_.reversed();
        Poly dd = den_.reversed();
        // pad with powers of x so both sides were scaled by x^n
        nn = nn * Poly::x(n - num_.degree());
        dd = dd * Poly::x(n - den_.degree());
        return RatFunc(nn, dd);
    }

    // f = polynomial_part + proper part (deg num < deg den).
    Poly polynomial_part() const { return num_.divmod(den_).first; }
    RatFunc proper_part() const { return RatFunc(num_.divmod(den_).second, den_); }

    RatFunc derivative() const {
        return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }
    // x d/dx, the Euler derivation used when commuting z-derivatives
    // past coefficient functions.
    RatFunc theta() const { return RatFunc(Poly::x()) * derivative(); }

    Rational eval(const Rational& v) const {
        Rational d = den_.eval(v);
        if (qlh::is_zero(d)) throw std::domain_error("evaluation at a pole");
        return num_.eval(v) / d;
    }

    bool has_pole_at(const Rational& v) const { return qlh::is_zero(den_.eval(v)); }

    int pole_order_at(const Rational& v) const {
        Poly d = den_;
        Poly lin(std::vector<Rational>{-v, Rational(1)});
        int m = 0;
        while (!d.is_zero()) {
            auto [q, r] = d.divmod(lin);
            if (!r.is_zero()) break;
            ++m;
            d = q;
        }
        return m;
    }

    // Laurent coefficients c_k of f at x = e, for k = -pole_order .. hi.
    // Returned as map k -> c_k (zeros omitted).
    std::map<int, Rational> laurent_at(const Rational& e, int hi) const {
        std::map<int, Rational> out;
        if (is_zero()) return out;
        int m = pole_order_at(e);
        Poly lin(std::vector<Rational>{-e, Rational(1)});
        Poly d1 = den_;
        for (int i = 0; i < m; ++i) d1 = d1.divmod(lin).first;
        // Taylor coefficients of num/d1 around e up to order hi + m.
        Poly ns = num_.shift(e);
        Poly ds = d1.shift(e);
        int depth = hi + m;
        if (depth < 0) return out;
        std::vector<Rational> t(depth + 1);
        Rational d0 = ds[0];
        for (int k = 0; k <= depth; ++k) {
            Rational acc = ns[k];
            for (int j = 0; j < k; ++j) acc -= t[j] * ds[k - j];
            t[k] = acc / d0;
        }
        for (int k = 0; k <= depth; ++k)
            if (!qlh::is_zero(t[k])) out[k - m] = t[k];
        return out;
    }

    // Principal part at e as a rational function.
    RatFunc principal_part_at(const Rational& e) const {
        int m = pole_order_at(e);
        if (m == 0) return RatFunc();
        auto lau = laurent_at(e, -1);
        RatFunc acc;
        Poly lin(std::vector<Rational>{-e, Rational(1)});
        for (auto& [k, c] : lau) {
            if (k >= 0) continue;
            acc += RatFunc(Poly(c), lin.pow(-k));
        }
        return acc;
    }

    // Regular value at e: the constant Laurent coefficient.
    Rational regular_value_at(const Rational& e) const {
        auto lau = laurent_at(e, 0);
        auto it = lau.find(0);
        return it == lau.end() ? Rational(0) : it->second;
    }

    // Decomposition over a supplied pole list. Throws if the denominator
    // has a root outside the list. The result is re-summed and checked.
    std::map<Rational, RatFunc> partial_fractions(const std::vector<Rational>& poles) const {
        std::map<Rational, RatFunc> parts;
        Poly rest = den_;
        for (const auto& e : poles) {
            Poly lin(std::vector<Rational>{-e, Rational(1)});
            while (true) {
                auto [q, r] = rest.divmod(lin);
                if (!r.is_zero()) break;
                rest = q;
            }
        }
        if (rest.degree() > 0)
            throw std::invalid_argument("denominator has a pole outside the supplied list");
        RatFunc sum(polynomial_part());
        for (const auto& e : poles) {
            RatFunc pri = principal_part_at(e);
            if (!pri.is_zero()) parts[e] = pri;
            sum += pri;
        }
        if (!(sum == *this)) throw std::logic_error("partial fraction re-summation failed");
        return parts;
    }

    // Laurent expansion around x = 0 as exponent -> coefficient, for
    // exponents in [lo, hi]. The denominator may vanish at 0.
    std::map<int, Rational> series_at_zero(int lo, int hi) const {
        std::map<int, Rational> out;
        if (is_zero()) return out;
        int vd = den_.valuation();
        Poly d1 = den_.shifted_down(vd);
        int depth = hi + vd;
        if (depth < 0) return out;
        std::vector<Rational> t(depth + 1);
        Rational d0 = d1[0];
        for (int k = 0; k <= depth; ++k) {
            Rational acc = num_[k];
            for (int j = 0; j < k; ++j) acc -= t[j] * d1[k - j];
            t[k] = acc / d0;
        }
        for (int k = 0; k <= depth; ++k) {
            int e = k - vd;
            if (e >= lo && e <= hi && !qlh::is_zero(t[k])) out[e] = t[k];
        }
        return out;
    }

    // Substitute another rational function for the variable.
    RatFunc compose(const RatFunc& inner) const {
        RatFunc n, d;
        for (int i = num_.degree(); i >= 0; --i) n = n * inner + RatFunc(num_[i]);
        for (int i = den_.degree(); i >= 0; --i) d = d * inner + RatFunc(den_[i]);
        return n / d;
    }

    // True iff f lies in Q[x, f_basic(r)], i.e. the only pole is at the
    // fixed point of the inversion, x = (-1)^{r+1}.
    bool in_poly_ring_with_f(int r) const {
        Rational sigma((r % 2 == 0) ? -1 : 1);
        Poly d = den_;
        Poly lin(std::vector<Rational>{-sigma, Rational(1)});
        while (d.degree() > 0) {
            auto [q, rem] = d.divmod(lin);
            if (!rem.is_zero()) return false;
            d = q;
        }
        return true;
    }

    // If f is a polynomial in f_basic(r) alone, return its coefficients.
    std::optional<Poly> as_poly_in_f(int r) const {
        Rational sigma((r % 2 == 0) ? -1 : 1);
        // x = f/(1 + sigma f)
        RatFunc xf(Poly::x(), Poly(std::vector<Rational>{Rational(1), sigma}));
        RatFunc comp = compose(xf);
        if (!comp.is_polynomial()) return std::nullopt;
        return comp.num();
    }

    std::string str(const std::string& var = "x") const {
        if (is_zero()) return "0";
        std::ostringstream os;
        if (is_polynomial()) {
            if (!qlh::is_one(den_[0])) {
                os << "(" << num_.str(var) << ")/" << qlh::to_string(den_[0]);
            } else {
                os << num_.str(var);
            }
            return os.str();
        }
        os << "(" << num_.str(var) << ")/(" << den_.str(var) << ")";
        return os.str();
    }

  private:
    void reduce() {
        if (den_.is_zero()) throw std::domain_error("zero denominator");
        if (num_.is_zero()) {
            den_ = Poly(Rational(1));
            return;
        }
        Poly g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = num_.divmod(g).first;
            den_ = den_.divmod(g).first;
        }
        Rational lc = den_.leading();
        if (!qlh::is_one(lc)) {
            Rational inv = Rational(1) / lc;
            num_ = inv * num_;
            den_ = inv * den_;
        }
    }

    Poly num_, den_;
};

}  // namespace qlh

#endif
