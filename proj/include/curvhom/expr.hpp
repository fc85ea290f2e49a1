#ifndef CURVHOM_EXPR_HPP
#define CURVHOM_EXPR_HPP

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coords.hpp"
#include "rational.hpp"

namespace curvhom {

// The expression class is closed by design: rational-coefficient polynomials
// in the coordinates times exp(m*y) with integer m.  Differentiation, sums and
// products stay inside the class, which is all the metric family needs.

inline constexpr int kYVar = 1; // flat index of y for every p

struct Monomial {
    std::map<int, int> pows; // var index -> exponent > 0
    int expn = 0;            // exp(expn * y)

    bool operator<(const Monomial& o) const {
        if (expn != o.expn) return expn < o.expn;
        return pows < o.pows;
    }
    bool operator==(const Monomial& o) const { return expn == o.expn && pows == o.pows; }
};

struct Point {
    std::map<int, Rational> v; // absent coordinate means 0

    Rational at(int c) const {
        auto it = v.find(c);
        return it == v.end() ? Rational(0) : it->second;
    }
    double at_double(int c) const { return to_double(at(c)); }
};

class Expr {
public:
    Expr() = default;
    static Expr constant(const Rational& c) {
        Expr e;
        if (c != 0) e.terms_[Monomial{}] = c;
        return e;
    }
    static Expr constant(long long c) { return constant(Rational(c)); }
    static Expr var(int idx) {
        Expr e;
        Monomial m;
        m.pows[idx] = 1;
        e.terms_[m] = Rational(1);
        return e;
    }
    static Expr exp_y(int m) {
        Expr e;
        Monomial mo;
        mo.expn = m;
        e.terms_[mo] = Rational(1);
        return e;
    }

    const std::map<Monomial, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{});
    }
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw std::logic_error("expr is not constant");
        return terms_.begin()->second;
    }
    bool has_exp() const {
        for (auto& [m, c] : terms_)
            if (m.expn != 0) return true;
        return false;
    }
    // degree of the polynomial part, jointly in all variables; -1 for the zero expr
    int total_degree() const {
        int d = -1;
        for (auto& [m, c] : terms_) {
            int s = 0;
            for (auto& [v, e] : m.pows) s += e;
            if (s > d) d = s;
        }
        return d;
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Expr operator-() const {
        Expr r;
        for (auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }
    Expr& operator+=(const Expr& o) {
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Expr& operator-=(const Expr& o) {
        for (auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Expr operator+(Expr a, const Expr& b) { a += b; return a; }
    friend Expr operator-(Expr a, const Expr& b) { a -= b; return a; }
    friend Expr operator*(const Expr& a, const Expr& b) {
        Expr r;
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) {
                Monomial m = ma;
                m.expn += mb.expn;
                for (auto& [v, e] : mb.pows) m.pows[v] += e;
                r.add_term(m, ca * cb);
            }
        return r;
    }
    Expr& operator*=(const Expr& o) { *this = *this * o; return *this; }
    friend Expr operator*(const Rational& c, const Expr& a) {
        Expr r;
        if (c == 0) return r;
        for (auto& [m, cc] : a.terms_) r.terms_[m] = c * cc;
        return r;
    }
    bool operator==(const Expr& o) const { return terms_ == o.terms_; }
    bool operator!=(const Expr& o) const { return !(*this == o); }

    Expr pow(int n) const {
        if (n < 0) throw std::invalid_argument("negative exponent on expr");
        Expr acc = constant(1);
        for (int i = 0; i < n; ++i) acc = acc * *this;
        return acc;
    }

    Expr derivative(int var) const {
        Expr r;
        for (auto& [m, c] : terms_) {
            auto it = m.pows.find(var);
            if (it != m.pows.end()) {
                Monomial mm = m;
                int e = it->second;
                if (e == 1) mm.pows.erase(var); else mm.pows[var] = e - 1;
                r.add_term(mm, c * e);
            }
            if (var == kYVar && m.expn != 0) r.add_term(m, c * m.expn);
        }
        return r;
    }

    // Exact evaluation is possible iff every exp factor sees argument 0.
    std::optional<Rational> evaluate_exact(const Point& P) const {
        Rational acc(0);
        for (auto& [m, c] : terms_) {
            if (m.expn != 0 && P.at(kYVar) != 0) return std::nullopt;
            Rational t = c;
            for (auto& [v, e] : m.pows) t *= rational_pow(P.at(v), e);
            acc += t;
        }
        return acc;
    }

    double evaluate_double(const Point& P) const {
        double acc = 0;
        for (auto& [m, c] : terms_) {
            double t = to_double(c);
            for (auto& [v, e] : m.pows) t *= std::pow(P.at_double(v), e);
            if (m.expn != 0) t *= std::exp(double(m.expn) * P.at_double(kYVar));
            acc += t;
        }
        return acc;
    }

    // y -> y + c.  Exp factors leave the class under translation unless absent.
    std::optional<Expr> shift_y(const Rational& c) const {
        Expr r;
        for (auto& [m, co] : terms_) {
            if (m.expn != 0) return std::nullopt;
            auto it = m.pows.find(kYVar);
            if (it == m.pows.end()) {
                r.add_term(m, co);
                continue;
            }
            int e = it->second;
            Monomial base = m;
            base.pows.erase(kYVar);
            // binomial expansion of (y+c)^e
            Rational binom(1);
            for (int j = 0; j <= e; ++j) {
                Monomial mm = base;
                if (j > 0) mm.pows[kYVar] = j;
                r.add_term(mm, co * binom * rational_pow(c, e - j));
                binom = binom * (e - j) / (j + 1);
            }
        }
        return r;
    }

    // uses only variables valid for F = F(y, z_1..z_p)
    bool depends_only_on_y_z(const Coordinates& co) const {
        for (auto& [m, c] : terms_)
            for (auto& [v, e] : m.pows) {
                auto k = co.kind(v);
                if (k != CoordKind::Y && k != CoordKind::Z) return false;
            }
        return true;
    }
    bool depends_only_on_y() const {
        for (auto& [m, c] : terms_)
            for (auto& [v, e] : m.pows)
                if (v != kYVar) return false;
        return true;
    }

    // printed in the scenario grammar so parse(print(e)) == e
    std::string to_string(const Coordinates& co) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto& [m, c] : terms_) {
            Rational mag = c < 0 ? Rational(-c) : c;
            if (first) {
                if (c < 0) out += "-";
                first = false;
            } else {
                out += c < 0 ? " - " : " + ";
            }
            std::vector<std::string> factors;
            bool unit = (mag == 1);
            if (!unit || (m.pows.empty() && m.expn == 0))
                factors.push_back(rational_to_string(mag));
            for (auto& [v, e] : m.pows) {
                std::string f = co.name(v);
                if (e > 1) f += "^" + std::to_string(e);
                factors.push_back(f);
            }
            if (m.expn != 0) {
                if (m.expn == 1) factors.push_back("exp(y)");
                else factors.push_back("exp(" + std::to_string(m.expn) + "*y)");
            }
            for (size_t i = 0; i < factors.size(); ++i) {
                if (i) out += "*";
                out += factors[i];
            }
        }
        return out;
    }

private:
    std::map<Monomial, Rational> terms_;
};

} // namespace curvhom

#endif
