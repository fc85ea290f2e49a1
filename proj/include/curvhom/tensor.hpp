#ifndef CURVHOM_TENSOR_HPP
#define CURVHOM_TENSOR_HPP

#include <map>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "rational.hpp"

namespace curvhom {

template <class T>
inline T scalar_cast(const Rational& v) {
    if constexpr (std::is_same_v<T, double>) return to_double(v);
    else return v;
}
template <class T>
inline T scalar_cast(double v) {
    static_assert(std::is_same_v<T, double>, "cannot promote floats back to exact scalars");
    return v;
}

// Dense covariant tensors of rank 4+k on a 10..18-dimensional space do not
// fit in memory as arrays, but the tensors of this family are extremely
// sparse, so everything is keyed on index tuples.

template <class S>
class SparseTensor {
public:
    using Index = std::vector<int>;

    SparseTensor() : dim_(0), arity_(0) {}
    SparseTensor(int dim, int arity) : dim_(dim), arity_(arity) {}

    int dim() const { return dim_; }
    int arity() const { return arity_; }
    const std::map<Index, S>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }
    size_t nonzero_count() const { return entries_.size(); }

    S get(const Index& idx) const {
        auto it = entries_.find(idx);
        return it == entries_.end() ? S(0) : it->second;
    }
    void set(const Index& idx, const S& v) {
        check(idx);
        if (ScalarTraits<S>::is_zero(v)) entries_.erase(idx);
        else entries_[idx] = v;
    }
    void add(const Index& idx, const S& v) {
        check(idx);
        auto it = entries_.find(idx);
        if (it == entries_.end()) {
            if (!ScalarTraits<S>::is_zero(v)) entries_[idx] = v;
        } else {
            it->second += v;
            if (ScalarTraits<S>::is_zero(it->second)) entries_.erase(it);
        }
    }

    bool operator==(const SparseTensor& o) const {
        return dim_ == o.dim_ && arity_ == o.arity_ && entries_ == o.entries_;
    }

    double max_abs_diff(const SparseTensor& o) const {
        double m = 0;
        for (auto& [k, v] : entries_) {
            double d = ScalarTraits<S>::magnitude(v - o.get(k));
            if (d > m) m = d;
        }
        for (auto& [k, v] : o.entries_) {
            if (entries_.count(k)) continue;
            double d = ScalarTraits<S>::magnitude(v);
            if (d > m) m = d;
        }
        return m;
    }

    S evaluate(const std::vector<std::vector<S>>& args) const {
        if (int(args.size()) != arity_) throw std::invalid_argument("arity mismatch");
        S acc(0);
        for (auto& [k, v] : entries_) {
            S t = v;
            for (int s = 0; s < arity_ && !ScalarTraits<S>::is_zero(t); ++s)
                t *= args[size_t(s)][size_t(k[size_t(s)])];
            acc += t;
        }
        return acc;
    }

    // (g*T)(v_1,..,v_a) = T(g v_1,..,g v_a), with g given by columns = images.
    // Processed slot-by-slot so sparsity carries through the whole pullback.
    SparseTensor pullback(const Matrix<S>& g) const {
        if (g.rows() != dim_ || g.cols() != dim_) throw std::invalid_argument("map dim mismatch");
        std::vector<std::vector<std::pair<int, S>>> row_nz(static_cast<size_t>(dim_));
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c)
                if (!ScalarTraits<S>::is_zero(g.at(r, c))) row_nz[size_t(r)].emplace_back(c, g.at(r, c));
        SparseTensor cur = *this;
        for (int s = 0; s < arity_; ++s) {
            SparseTensor next(dim_, arity_);
            for (auto& [k, v] : cur.entries_) {
                for (auto& [c, coef] : row_nz[size_t(k[size_t(s)])]) {
                    Index idx = k;
                    idx[size_t(s)] = c;
                    next.add(idx, v * coef);
                }
            }
            cur = std::move(next);
        }
        return cur;
    }

    // d/dt|_0 of exp(tA)*T: sum over slots of T(v_1,..,A v_s,..,v_a)
    SparseTensor derivation_action(const Matrix<S>& A) const {
        if (A.rows() != dim_ || A.cols() != dim_) throw std::invalid_argument("map dim mismatch");
        std::vector<std::vector<std::pair<int, S>>> row_nz(static_cast<size_t>(dim_));
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c)
                if (!ScalarTraits<S>::is_zero(A.at(r, c))) row_nz[size_t(r)].emplace_back(c, A.at(r, c));
        SparseTensor out(dim_, arity_);
        for (auto& [k, v] : entries_)
            for (int s = 0; s < arity_; ++s)
                for (auto& [c, coef] : row_nz[size_t(k[size_t(s)])]) {
                    Index idx = k;
                    idx[size_t(s)] = c;
                    out.add(idx, v * coef);
                }
        return out;
    }

    // keep entries supported on the leading block of coordinates
    SparseTensor restrict_to(int new_dim) const {
        SparseTensor out(new_dim, arity_);
        for (auto& [k, v] : entries_) {
            bool keep = true;
            for (int s = 0; s < arity_ && keep; ++s) keep = k[size_t(s)] < new_dim;
            if (keep) out.entries_[k] = v;
        }
        return out;
    }

    template <class T>
    SparseTensor<T> cast() const {
        SparseTensor<T> out(dim_, arity_);
        for (auto& [k, v] : entries_) out.set(k, scalar_cast<T>(v));
        return out;
    }

private:
    void check(const Index& idx) const {
        if (int(idx.size()) != arity_) throw std::invalid_argument("index arity mismatch");
        for (int i : idx)
            if (i < 0 || i >= dim_) throw std::out_of_range("tensor index out of range");
    }

    int dim_, arity_;
    std::map<Index, S> entries_;

    template <class T>
    friend class SparseTensor;
};

// Write value at (a,b,c,d | extra...) together with the images forced by the
// algebraic curvature symmetries.  Overlapping images must agree, so this
// assigns rather than accumulates (generators with a=d or b=c collapse the
// eight patterns to four).
template <class S>
inline void set_curvature_orbit(SparseTensor<S>& t, int a, int b, int c, int d,
                                const std::vector<int>& extra, const S& v) {
    const int signs[8][5] = {
        {a, b, c, d, +1}, {b, a, c, d, -1}, {a, b, d, c, -1}, {b, a, d, c, +1},
        {c, d, a, b, +1}, {d, c, a, b, -1}, {c, d, b, a, -1}, {d, c, b, a, +1},
    };
    for (auto& row : signs) {
        std::vector<int> idx = {row[0], row[1], row[2], row[3]};
        idx.insert(idx.end(), extra.begin(), extra.end());
        S val = row[4] > 0 ? v : S(-v);
        S existing = t.get(idx);
        if (!ScalarTraits<S>::is_zero(existing) && !ScalarTraits<S>::is_zero(existing - val))
            throw std::logic_error("curvature symmetry conflict");
        t.set(idx, val);
    }
}

} // namespace curvhom

#endif
