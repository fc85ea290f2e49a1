#ifndef CURVHOM_LINALG_HPP
#define CURVHOM_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace curvhom {

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& x) { return x == 0; }
    static double magnitude(const Rational& x) { return std::fabs(to_double(x)); }
};

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static bool is_zero(double x) { return std::fabs(x) < 1e-12; }
    static double magnitude(double x) { return std::fabs(x); }
};

template <class S>
class Matrix {
public:
    Matrix() : r_(0), c_(0) {}
    Matrix(int r, int c) : r_(r), c_(c), d_(size_t(r) * c, S(0)) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = S(1);
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    S& at(int r, int c) { return d_[size_t(r) * c_ + c]; }
    const S& at(int r, int c) const { return d_[size_t(r) * c_ + c]; }

    Matrix transpose() const {
        Matrix m(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.c_ != b.r_) throw std::invalid_argument("matrix shape mismatch");
        Matrix m(a.r_, b.c_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                const S& av = a.at(i, k);
                if (ScalarTraits<S>::is_zero(av)) continue;
                for (int j = 0; j < b.c_; ++j) m.at(i, j) += av * b.at(k, j);
            }
        return m;
    }

    std::vector<S> apply(const std::vector<S>& v) const {
        if (int(v.size()) != c_) throw std::invalid_argument("vector length mismatch");
        std::vector<S> out(r_, S(0));
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) out[i] += at(i, j) * v[j];
        return out;
    }

    bool operator==(const Matrix& o) const { return r_ == o.r_ && c_ == o.c_ && d_ == o.d_; }

    // in-place reduced row echelon form; returns pivot column per pivot row
    std::vector<int> rref() {
        std::vector<int> pivots;
        int row = 0;
        for (int col = 0; col < c_ && row < r_; ++col) {
            int sel = -1;
            if constexpr (ScalarTraits<S>::exact) {
                for (int i = row; i < r_; ++i)
                    if (!ScalarTraits<S>::is_zero(at(i, col))) { sel = i; break; }
            } else {
                double best = 0;
                for (int i = row; i < r_; ++i) {
                    double m = ScalarTraits<S>::magnitude(at(i, col));
                    if (m > best) { best = m; sel = i; }
                }
                if (best < 1e-12) sel = -1;
            }
            if (sel < 0) continue;
            if (sel != row)
                for (int j = 0; j < c_; ++j) std::swap(at(sel, j), at(row, j));
            S inv = S(1) / at(row, col);
            for (int j = col; j < c_; ++j) at(row, j) = at(row, j) * inv;
            at(row, col) = S(1);
            for (int i = 0; i < r_; ++i) {
                if (i == row) continue;
                S f = at(i, col);
                if (ScalarTraits<S>::is_zero(f)) continue;
                for (int j = col; j < c_; ++j) at(i, j) -= f * at(row, j);
                at(i, col) = S(0);
            }
            pivots.push_back(col);
            ++row;
        }
        return pivots;
    }

    int rank() const {
        Matrix m = *this;
        return int(m.rref().size());
    }

    // basis of { x : Ax = 0 }
    std::vector<std::vector<S>> nullspace() const {
        Matrix m = *this;
        std::vector<int> piv = m.rref();
        std::vector<bool> is_piv(c_, false);
        for (int p : piv) is_piv[p] = true;
        std::vector<std::vector<S>> basis;
        for (int f = 0; f < c_; ++f) {
            if (is_piv[f]) continue;
            std::vector<S> x(c_, S(0));
            x[f] = S(1);
            for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = -m.at(int(r), f);
            basis.push_back(std::move(x));
        }
        return basis;
    }

    // one solution of Ax = b, or nullopt if inconsistent
    std::optional<std::vector<S>> solve(const std::vector<S>& b) const {
        if (int(b.size()) != r_) throw std::invalid_argument("rhs length mismatch");
        Matrix aug(r_, c_ + 1);
        for (int i = 0; i < r_; ++i) {
            for (int j = 0; j < c_; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, c_) = b[i];
        }
        std::vector<int> piv = aug.rref();
        if (!piv.empty() && piv.back() == c_) return std::nullopt;
        std::vector<S> x(c_, S(0));
        for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug.at(int(r), c_);
        return x;
    }

    std::optional<Matrix> inverse() const {
        if (r_ != c_) throw std::invalid_argument("inverse of non-square matrix");
        Matrix aug(r_, 2 * c_);
        for (int i = 0; i < r_; ++i) {
            for (int j = 0; j < c_; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, c_ + i) = S(1);
        }
        std::vector<int> piv = aug.rref();
        if (int(piv.size()) != r_ || piv.back() != r_ - 1) return std::nullopt;
        Matrix inv(r_, c_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) inv.at(i, j) = aug.at(i, c_ + j);
        return inv;
    }

private:
    int r_, c_;
    std::vector<S> d_;
};

// Signature of an exact symmetric bilinear form by congruence diagonalization.
struct Signature {
    int positive = 0;
    int negative = 0;
    int zero = 0;
    int rank() const { return positive + negative; }
};

inline Signature symmetric_signature(Matrix<Rational> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("signature of non-square matrix");
    int n = m.rows();
    Signature sig;
    std::vector<bool> done(n, false);
    for (int step = 0; step < n; ++step) {
        int piv = -1;
        for (int i = 0; i < n; ++i)
            if (!done[i] && m.at(i, i) != 0) { piv = i; break; }
        if (piv < 0) {
            // no diagonal pivot: manufacture one from an off-diagonal entry
            int a = -1, b = -1;
            for (int i = 0; i < n && a < 0; ++i) {
                if (done[i]) continue;
                for (int j = i + 1; j < n; ++j)
                    if (!done[j] && m.at(i, j) != 0) { a = i; b = j; break; }
            }
            if (a < 0) break; // remaining block is zero
            for (int j = 0; j < n; ++j) m.at(a, j) += m.at(b, j);
            for (int i = 0; i < n; ++i) m.at(i, a) += m.at(i, b);
            piv = a;
        }
        Rational d = m.at(piv, piv);
        for (int i = 0; i < n; ++i) {
            if (i == piv || done[i]) continue;
            Rational f = m.at(i, piv) / d;
            if (f == 0) continue;
            for (int j = 0; j < n; ++j) m.at(i, j) -= f * m.at(piv, j);
            for (int j = 0; j < n; ++j) m.at(j, i) -= f * m.at(j, piv);
        }
        done[piv] = true;
        if (d > 0) ++sig.positive; else ++sig.negative;
    }
    sig.zero = n - sig.rank();
    return sig;
}

// Incremental exact row reduction for large sparse constraint systems.  Rows
// arrive one at a time; each is reduced against the current pivots, and on
// survival becomes a new pivot row (kept normalized and back-substituted, so
// the stored rows always form an RREF of everything seen so far).
class RowReducer {
public:
    using SparseRow = std::map<int, Rational>;

    explicit RowReducer(int ncols) : ncols_(ncols) {}

    int cols() const { return ncols_; }
    int rank() const { return int(rows_.size()); }
    const std::map<int, SparseRow>& rows() const { return rows_; }

    // returns true if the row was independent of everything seen so far
    bool add_row(SparseRow row) {
        reduce(row);
        if (row.empty()) return false;
        int lead = row.begin()->first;
        Rational inv = Rational(1) / row.begin()->second;
        for (auto& [c, v] : row) v *= inv;
        for (auto& [p, r] : rows_) {
            auto it = r.find(lead);
            if (it == r.end()) continue;
            Rational f = it->second;
            r.erase(it);
            for (auto& [c, v] : row) {
                if (c == lead) continue;
                auto jt = r.find(c);
                if (jt == r.end()) {
                    r[c] = -f * v;
                } else {
                    jt->second -= f * v;
                    if (jt->second == 0) r.erase(jt);
                }
            }
        }
        rows_[lead] = std::move(row);
        return true;
    }

    // reduce v against the stored pivots (in place)
    void reduce(SparseRow& v) const {
        for (auto it = v.begin(); it != v.end();) {
            auto pit = rows_.find(it->first);
            if (pit == rows_.end()) { ++it; continue; }
            Rational f = it->second;
            for (auto& [c, val] : pit->second) {
                auto jt = v.find(c);
                if (jt == v.end()) {
                    v[c] = -f * val;
                } else {
                    jt->second -= f * val;
                    if (jt->second == 0) v.erase(jt);
                }
            }
            it = v.upper_bound(pit->first);
        }
    }

    // dot of a stored constraint combination with a dense vector
    bool annihilates(const std::vector<Rational>& v) const {
        for (auto& [p, r] : rows_) {
            Rational acc(0);
            for (auto& [c, val] : r) acc += val * v[size_t(c)];
            if (acc != 0) return false;
        }
        return true;
    }

    // basis of the common kernel of all rows seen so far
    std::vector<std::vector<Rational>> nullspace() const {
        std::vector<std::vector<Rational>> basis;
        for (int f = 0; f < ncols_; ++f) {
            if (rows_.count(f)) continue;
            std::vector<Rational> x(size_t(ncols_), Rational(0));
            x[size_t(f)] = 1;
            for (auto& [p, r] : rows_) {
                auto it = r.find(f);
                if (it != r.end()) x[size_t(p)] = -it->second;
            }
            basis.push_back(std::move(x));
        }
        return basis;
    }

private:
    int ncols_;
    std::map<int, SparseRow> rows_; // pivot column -> normalized row
};

} // namespace curvhom

#endif
