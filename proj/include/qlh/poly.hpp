#ifndef QLH_POLY_HPP
#define QLH_POLY_HPP

#include <qlh/rational.hpp>

#include <algorithm>
#include <sstream>
#include <utility>
#include <vector>

namespace qlh {

// Dense univariate polynomial over Rational. coeffs[i] is the x^i
// coefficient; the leading coefficient is nonzero unless the polynomial
// is zero (empty vector).
class Poly {
  public:
    Poly() = default;
    explicit Poly(Rational c) {
        if (!qlh::is_zero(c)) coeffs_.push_back(std::move(c));
    }
    explicit Poly(std::vector<Rational> cs) : coeffs_(std::move(cs)) { trim(); }

    static Poly x(int power = 1) {
        std::vector<Rational> c(power + 1);
        c[power] = 1;
        return Poly(std::move(c));
    }
    static Poly monomial(Rational c, int power) {
        std::vector<Rational> cs(power + 1);
        cs[power] = std::move(c);
        return Poly(std::move(cs));
    }

    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.size() <= 1; }
    // Degree of the zero polynomial is -1 by convention.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    const Rational& operator[](int i) const {
        static const Rational kZero(0);
        return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[i] : kZero;
    }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    Rational leading() const { return is_zero() ? Rational(0) : coeffs_.back(); }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (size_t i = 0; i < c.size(); ++i) c[i] = a[static_cast<int>(i)] + b[static_cast<int>(i)];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (size_t i = 0; i < c.size(); ++i) c[i] = a[static_cast<int>(i)] - b[static_cast<int>(i)];
        return Poly(std::move(c));
    }
    Poly operator-() const {
        Poly r(*this);
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1);
        for (size_t i = 0; i < a.coeffs_.size(); ++i)
            for (size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Poly(std::move(c));
    }
    friend Poly operator*(const Rational& s, const Poly& a) {
        if (qlh::is_zero(s)) return {};
        Poly r(a);
        for (auto& c : r.coeffs_) c *= s;
        return r;
    }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    bool operator==(const Poly& o) const { return coeffs_ == o.coeffs_; }

    // Euclidean division: *this = q*d + r with deg r < deg d.
    std::pair<Poly, Poly> divmod(const Poly& d) const {
        if (d.is_zero()) throw std::domain_error("polynomial division by zero");
        Poly r(*this);
        std::vector<Rational> q(std::max<int>(degree() - d.degree() + 1, 0));
        while (!r.is_zero() && r.degree() >= d.degree()) {
            int k = r.degree() - d.degree();
            Rational c = r.leading() / d.leading();
            q[k] = c;
            std::vector<Rational> sub(k + 1);
            sub[k] = c;
            r -= Poly(std::move(sub)) * d;
            // guard against non-cancellation due to a logic error
            if (!r.is_zero() && r.degree() >= k + d.degree()) throw std::logic_error("divmod stall");
        }
        return {Poly(std::move(q)), r};
    }

    Poly pow(int e) const {
        if (e < 0) throw std::domain_error("negative polynomial power");
        Poly acc{Rational(1)}, base(*this);
        while (e) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    Rational eval(const Rational& v) const {
        Rational acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * v + *it;
        return acc;
    }

    Poly derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<Rational> c(coeffs_.size() - 1);
        for (size_t i = 1; i < coeffs_.size(); ++i) c[i - 1] = Rational(static_cast<long>(i)) * coeffs_[i];
        return Poly(std::move(c));
    }

    // p(x + c), exact Taylor shift.
    Poly shift(const Rational& c) const {
        Poly r;
        Poly base{Rational(1)};
        Poly lin(std::vector<Rational>{c, Rational(1)});
        for (size_t i = 0; i < coeffs_.size(); ++i) {
            r += coeffs_[i] * base;
            if (i + 1 < coeffs_.size()) base *= lin;
        }
        return r;
    }

    // x^deg * p(1/x).
    Poly reversed() const {
        std::vector<Rational> c(coeffs_.rbegin(), coeffs_.rend());
        return Poly(std::move(c));
    }

    // Lowest power of x dividing p (0 for p with nonzero constant term).
    int valuation() const {
        for (size_t i = 0; i < coeffs_.size(); ++i)
            if (!qlh::is_zero(coeffs_[i])) return static_cast<int>(i);
        return 0;
    }

    Poly shifted_down(int k) const {  // divide by x^k, assumes divisible
        if (k == 0) return *this;
        std::vector<Rational> c(coeffs_.begin() + std::min<size_t>(k, coeffs_.size()), coeffs_.end());
        return Poly(std::move(c));
    }

    Poly monic() const {
        if (is_zero()) return {};
        return (Rational(1) / leading()) * *this;
    }

    std::string str(const std::string& var = "x") const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (int i = 0; i <= degree(); ++i) {
            const Rational& c = coeffs_[i];
            if (qlh::is_zero(c)) continue;
            Rational a = c;
            if (first) {
                if (sgn(a) < 0) {
                    os << "-";
                    a = -a;
                }
            } else {
                os << (sgn(a) < 0 ? " - " : " + ");
                if (sgn(a) < 0) a = -a;
            }
            if (i == 0 || !qlh::is_one(a)) {
                os << qlh::to_string(a);
                if (i > 0) os << "*";
            }
            if (i == 1) os << var;
            if (i > 1) os << var << "^" << i;
            first = false;
        }
        return os.str();
    }

  private:
    void trim() {
        while (!coeffs_.empty() && qlh::is_zero(coeffs_.back())) coeffs_.pop_back();
    }
    std::vector<Rational> coeffs_;
};

inline Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = a.divmod(b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

}  // namespace qlh

#endif
