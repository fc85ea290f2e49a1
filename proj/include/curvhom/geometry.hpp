#ifndef CURVHOM_GEOMETRY_HPP
#define CURVHOM_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "coords.hpp"
#include "expr.hpp"

namespace curvhom {

// Covariant tensor field with symbolic entries, sparse over index tuples.
struct TensorField {
    int dim = 0;
    int arity = 0;
    std::map<std::vector<int>, Expr> entries;

    TensorField() = default;
    TensorField(int d, int a) : dim(d), arity(a) {}

    Expr get(const std::vector<int>& idx) const {
        auto it = entries.find(idx);
        return it == entries.end() ? Expr() : it->second;
    }
    void add(const std::vector<int>& idx, const Expr& e) {
        if (e.is_zero()) return;
        auto it = entries.find(idx);
        if (it == entries.end()) {
            entries[idx] = e;
        } else {
            it->second += e;
            if (it->second.is_zero()) entries.erase(it);
        }
    }
    bool is_zero() const { return entries.empty(); }
};

// f_{p,k} for k = 0..p+2: 0, then z_1 y^2 + .. + z_k y^{k+1}, then the two
// top members with an extra y^{p+3} or exp(y) term.
inline Expr builtin_F(int p, int k) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    if (k < 0 || k > p + 2) throw std::invalid_argument("k out of range");
    Coordinates co(p);
    Expr f;
    int zmax = std::min(k, p);
    for (int i = 1; i <= zmax; ++i) f += Expr::var(co.z(i)) * Expr::var(co.y()).pow(i + 1);
    if (k == p + 1) f += Expr::var(co.y()).pow(p + 3);
    if (k == p + 2) f += Expr::exp_y(1);
    return f;
}

// psi(y) + sum_i z_i y^{i+1}
inline Expr psi_family_F(int p, const Expr& psi) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    if (!psi.depends_only_on_y()) throw std::invalid_argument("psi must depend on y alone");
    Coordinates co(p);
    Expr f = psi;
    for (int i = 1; i <= p; ++i) f += Expr::var(co.z(i)) * Expr::var(co.y()).pow(i + 1);
    return f;
}

// The metric on R^{6+4p}: g(dx,dx) = -2 Phi with Phi = F + y yt + sum z_i zt_i,
// and unit pairings between each coordinate and its dual.  Levi-Civita data
// and covariant derivatives of the curvature are computed generically from
// the component functions and cached.
class Manifold {
public:
    Manifold(int p, Expr F) : co_(p), F_(std::move(F)) {
        if (!F_.depends_only_on_y_z(co_))
            throw std::invalid_argument("F may only involve y and z_1..z_p");
        phi_ = F_ + Expr::var(co_.y()) * Expr::var(co_.ytilde());
        for (int i = 1; i <= p; ++i)
            phi_ += Expr::var(co_.z(i)) * Expr::var(co_.ztilde(i));
        build_metric();
        build_christoffel();
    }

    const Coordinates& coords() const { return co_; }
    const Expr& F() const { return F_; }
    const Expr& potential() const { return phi_; }

    Expr metric_entry(int a, int b) const { return lookup(metric_, a, b); }
    Expr inverse_entry(int a, int b) const { return lookup(ginv_, a, b); }
    const std::map<std::pair<int, int>, Expr>& metric_entries() const { return metric_; }
    const std::map<std::pair<int, int>, Expr>& inverse_entries() const { return ginv_; }
    const std::map<std::array<int, 3>, Expr>& christoffel() const { return gamma_; }

    TensorField metric_field() const {
        TensorField g(co_.dim(), 2);
        for (auto& [k, e] : metric_) g.add({k.first, k.second}, e);
        return g;
    }

    // nabla T, one covariant slot appended at the end
    TensorField covariant_derivative(const TensorField& T) const {
        TensorField out(co_.dim(), T.arity + 1);
        for (auto& [I, e] : T.entries) {
            for (int m = 0; m < co_.dim(); ++m) {
                Expr d = e.derivative(m);
                if (d.is_zero()) continue;
                std::vector<int> idx = I;
                idx.push_back(m);
                out.add(idx, d);
            }
            for (int s = 0; s < T.arity; ++s) {
                auto it = gamma_by_upper_.find(I[size_t(s)]);
                if (it == gamma_by_upper_.end()) continue;
                for (auto& [m, c, G] : it->second) {
                    std::vector<int> idx = I;
                    idx[size_t(s)] = c;
                    idx.push_back(m);
                    out.add(idx, -(G * e));
                }
            }
        }
        return out;
    }

    // nabla^k R as a rank 4+k field
    const TensorField& curvature(int k) {
        if (nabla_r_.empty()) nabla_r_.push_back(build_curvature());
        while (int(nabla_r_.size()) <= k)
            nabla_r_.push_back(covariant_derivative(nabla_r_.back()));
        return nabla_r_[size_t(k)];
    }

    bool is_symmetric_space() { return curvature(1).is_zero(); }

    // scalar curvature, |Ric|^2, |R|^2, the cubic curvature trace, and the
    // Laplacian of the scalar curvature, in that order
    std::array<Expr, 5> weyl_scalars() {
        const TensorField& R = curvature(0);
        TensorField ric(co_.dim(), 2);
        for (auto& [I, e] : R.entries) {
            Expr w = inverse_entry(I[0], I[3]);
            if (!w.is_zero()) ric.add({I[1], I[2]}, w * e);
        }
        Expr tau;
        for (auto& [I, e] : ric.entries) tau += inverse_entry(I[0], I[1]) * e;
        Expr ric2;
        for (auto& [I, e] : ric.entries)
            for (auto& [J, f] : ric.entries) {
                Expr w = inverse_entry(I[0], J[0]) * inverse_entry(I[1], J[1]);
                if (!w.is_zero()) ric2 += w * e * f;
            }
        Expr r2;
        for (auto& [I, e] : R.entries)
            for (auto& [J, f] : R.entries) {
                Expr w = inverse_entry(I[0], J[0]);
                if (w.is_zero()) continue;
                for (int s = 1; s < 4; ++s) {
                    w *= inverse_entry(I[size_t(s)], J[size_t(s)]);
                    if (w.is_zero()) break;
                }
                if (!w.is_zero()) r2 += w * e * f;
            }
        // R_{ab}^{cd} with both last slots raised, then a closed 3-cycle trace
        std::map<std::vector<int>, Expr> mixed;
        for (auto& [I, e] : R.entries)
            for (int c = 0; c < co_.dim(); ++c) {
                Expr w1 = inverse_entry(c, I[2]);
                if (w1.is_zero()) continue;
                for (int d = 0; d < co_.dim(); ++d) {
                    Expr w2 = inverse_entry(d, I[3]);
                    if (w2.is_zero()) continue;
                    std::vector<int> idx = {I[0], I[1], c, d};
                    Expr v = w1 * w2 * e;
                    auto it = mixed.find(idx);
                    if (it == mixed.end()) mixed[idx] = v;
                    else it->second += v;
                }
            }
        std::map<std::pair<int, int>, std::vector<std::pair<std::vector<int>, Expr>>> by_lower;
        for (auto& [I, e] : mixed) by_lower[{I[0], I[1]}].push_back({I, e});
        Expr cubic;
        for (auto& [I, e] : mixed) {
            auto it = by_lower.find({I[2], I[3]});
            if (it == by_lower.end()) continue;
            for (auto& [J, f] : it->second) {
                auto jt = mixed.find({J[2], J[3], I[0], I[1]});
                if (jt != mixed.end()) cubic += e * f * jt->second;
            }
        }
        Expr laptau;
        for (auto& [ab, w] : ginv_) {
            Expr term = tau.derivative(ab.first).derivative(ab.second);
            for (auto& [key, G] : gamma_) {
                if (key[1] == ab.first && key[2] == ab.second)
                    term -= G * tau.derivative(key[0]);
            }
            laptau += w * term;
        }
        return {tau, ric2, r2, cubic, laptau};
    }

    struct ClosedFormReport {
        bool ok = true;
        std::string detail;
    };

    // Independently rebuild nabla^k R from partial derivatives of Phi: the
    // only non-zero components carry two x's among the first four slots
    // ({1,4},{2,3} positive, {1,3},{2,4} negative) and the remaining slots
    // form a totally symmetric derivative of Phi.
    ClosedFormReport check_closed_form(int max_order) {
        std::vector<int> vars;
        for (int c = 0; c < co_.dim(); ++c)
            if (c != co_.x() && !co_.is_starred(c)) vars.push_back(c);
        for (int k = 0; k <= max_order; ++k) {
            const TensorField& computed = curvature(k);
            TensorField expect(co_.dim(), 4 + k);
            std::vector<int> multiset;
            enumerate_derivatives(vars, 0, k + 2, phi_, multiset, expect);
            auto mismatch = first_difference(computed, expect);
            if (!mismatch.empty())
                return {false, "order " + std::to_string(k) + " at " + mismatch};
        }
        return {true, ""};
    }

private:
    Expr lookup(const std::map<std::pair<int, int>, Expr>& m, int a, int b) const {
        auto it = m.find({a, b});
        return it == m.end() ? Expr() : it->second;
    }

    void build_metric() {
        metric_[{co_.x(), co_.x()}] = Expr::constant(-2) * phi_;
        for (int c = 0; c < co_.half(); ++c) {
            metric_[{c, co_.dual(c)}] = Expr::constant(1);
            metric_[{co_.dual(c), c}] = Expr::constant(1);
        }
        ginv_[{co_.xstar(), co_.xstar()}] = Expr::constant(2) * phi_;
        for (int c = 0; c < co_.half(); ++c) {
            ginv_[{c, co_.dual(c)}] = Expr::constant(1);
            ginv_[{co_.dual(c), c}] = Expr::constant(1);
        }
    }

    // Gamma^e_{bc} = 1/2 g^{ea} (d_b g_{ac} + d_c g_{ab} - d_a g_{bc})
    void build_christoffel() {
        Rational half(1, 2);
        for (int e = 0; e < co_.dim(); ++e)
            for (int b = 0; b < co_.dim(); ++b)
                for (int c = b; c < co_.dim(); ++c) {
                    Expr acc;
                    for (auto& [ea, w] : ginv_) {
                        if (ea.first != e) continue;
                        int a = ea.second;
                        Expr s = lookup(metric_, a, c).derivative(b)
                               + lookup(metric_, a, b).derivative(c)
                               - lookup(metric_, b, c).derivative(a);
                        acc += w * s;
                    }
                    acc = half * acc;
                    if (acc.is_zero()) continue;
                    gamma_[{e, b, c}] = acc;
                    if (b != c) gamma_[{e, c, b}] = acc;
                }
        for (auto& [key, G] : gamma_)
            gamma_by_upper_[key[0]].push_back({key[1], key[2], G});
    }

    // R(d_a,d_b)d_c = R^e_{abc} d_e, lowered through the metric in slot four
    TensorField build_curvature() {
        std::map<std::vector<int>, Expr> rup; // {e,a,b,c}
        auto acc = [&](std::vector<int> idx, const Expr& v) {
            if (v.is_zero()) return;
            auto it = rup.find(idx);
            if (it == rup.end()) rup[std::move(idx)] = v;
            else {
                it->second += v;
                if (it->second.is_zero()) rup.erase(it);
            }
        };
        for (auto& [key, G] : gamma_) {
            for (int m = 0; m < co_.dim(); ++m) {
                Expr d = G.derivative(m);
                if (d.is_zero()) continue;
                acc({key[0], m, key[1], key[2]}, d);
                acc({key[0], key[1], m, key[2]}, -d);
            }
        }
        for (auto& [k1, G1] : gamma_)
            for (auto& [k2, G2] : gamma_) {
                if (k1[2] != k2[0]) continue; // Gamma^e_{a f} Gamma^f_{b c}
                Expr prod = G1 * G2;
                acc({k1[0], k1[1], k2[1], k2[2]}, prod);
                acc({k1[0], k2[1], k1[1], k2[2]}, -prod);
            }
        TensorField R(co_.dim(), 4);
        for (auto& [idx, e] : rup)
            for (auto& [ed, w] : metric_) {
                if (ed.first != idx[0]) continue;
                R.add({idx[1], idx[2], idx[3], ed.second}, w * e);
            }
        return R;
    }

    void enumerate_derivatives(const std::vector<int>& vars, size_t start, int remaining,
                               const Expr& cur, std::vector<int>& multiset, TensorField& out) {
        if (cur.is_zero()) return;
        if (remaining == 0) {
            emit_closed_form_entries(multiset, cur, out);
            return;
        }
        for (size_t vi = start; vi < vars.size(); ++vi) {
            multiset.push_back(vars[vi]);
            enumerate_derivatives(vars, vi, remaining - 1, cur.derivative(vars[vi]), multiset, out);
            multiset.pop_back();
        }
    }

    void emit_closed_form_entries(const std::vector<int>& multiset, const Expr& value,
                                  TensorField& out) {
        std::vector<int> perm = multiset;
        std::sort(perm.begin(), perm.end());
        int x = co_.x();
        do {
            std::vector<int> rest(perm.begin() + 2, perm.end());
            int s1 = perm[0], s2 = perm[1];
            auto put = [&](int a, int b, int c, int d, int sign) {
                std::vector<int> idx = {a, b, c, d};
                idx.insert(idx.end(), rest.begin(), rest.end());
                out.add(idx, sign > 0 ? value : -value);
            };
            put(x, s1, s2, x, +1);
            put(s1, x, x, s2, +1);
            put(x, s1, x, s2, -1);
            put(s1, x, s2, x, -1);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    std::string first_difference(const TensorField& a, const TensorField& b) const {
        auto fmt = [&](const std::vector<int>& idx) {
            std::string s = "(";
            for (size_t i = 0; i < idx.size(); ++i) {
                if (i) s += ",";
                s += co_.name(idx[i]);
            }
            return s + ")";
        };
        for (auto& [idx, e] : a.entries)
            if (!(e == b.get(idx)))
                return fmt(idx) + ": computed " + e.to_string(co_) + " vs closed form " +
                       b.get(idx).to_string(co_);
        for (auto& [idx, e] : b.entries)
            if (!a.entries.count(idx))
                return fmt(idx) + ": computed 0 vs closed form " + e.to_string(co_);
        return "";
    }

    Coordinates co_;
    Expr F_;
    Expr phi_;
    std::map<std::pair<int, int>, Expr> metric_;
    std::map<std::pair<int, int>, Expr> ginv_;
    std::map<std::array<int, 3>, Expr> gamma_;
    std::map<int, std::vector<std::tuple<int, int, Expr>>> gamma_by_upper_;
    std::vector<TensorField> nabla_r_;
};

} // namespace curvhom

#endif
