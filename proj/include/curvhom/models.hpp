#ifndef CURVHOM_MODELS_HPP
#define CURVHOM_MODELS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coords.hpp"
#include "geometry.hpp"
#include "linalg.hpp"
#include "tensor.hpp"

namespace curvhom {

// (V, <,>, A^0..A^k): the inner product and the curvature-shaped tensors of
// rank 4+i, all expressed in a fixed basis of dimension 6+4p.
template <class S>
struct Model {
    int p = 0;
    int dim = 0;
    Matrix<S> inner;
    std::vector<SparseTensor<S>> tensors;

    int order() const { return int(tensors.size()) - 1; }
};

// Metric-suppressed restriction to the span of the first 3+2p directions.
template <class S>
struct AffineModel {
    int p = 0;
    int dim = 0;
    std::vector<SparseTensor<S>> tensors;

    int order() const { return int(tensors.size()) - 1; }
};

inline Model<Rational> standard_model(int p, int k) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    if (k < 0 || k > p + 2) throw std::invalid_argument("k out of range");
    Coordinates co(p);
    Model<Rational> m;
    m.p = p;
    m.dim = co.dim();
    m.inner = Matrix<Rational>(m.dim, m.dim);
    for (int c = 0; c < m.dim; ++c) m.inner.at(c, co.dual(c)) = 1;
    for (int i = 0; i <= k; ++i) m.tensors.emplace_back(m.dim, 4 + i);

    int x = co.x(), y = co.y();
    set_curvature_orbit<Rational>(m.tensors[0], x, y, co.ytilde(), x, {}, 1);
    for (int i = 1; i <= p; ++i)
        set_curvature_orbit<Rational>(m.tensors[0], x, co.z(i), co.ztilde(i), x, {}, 1);
    for (int j = 1; j <= std::min(k, p); ++j) {
        std::vector<int> ys(size_t(j), y);
        set_curvature_orbit<Rational>(m.tensors[size_t(j)], x, y, co.z(j), x, ys, 1);
        for (int s = 0; s < j; ++s) {
            std::vector<int> extra = ys;
            extra[size_t(s)] = co.z(j);
            set_curvature_orbit<Rational>(m.tensors[size_t(j)], x, y, y, x, extra, 1);
        }
    }
    for (int j = p + 1; j <= k; ++j) {
        std::vector<int> ys(size_t(j), y);
        set_curvature_orbit<Rational>(m.tensors[size_t(j)], x, y, y, x, ys, 1);
    }
    return m;
}

template <class S>
inline AffineModel<S> restrict_model(const Model<S>& m) {
    AffineModel<S> a;
    a.p = m.p;
    a.dim = 3 + 2 * m.p;
    for (auto& t : m.tensors) a.tensors.push_back(t.restrict_to(a.dim));
    return a;
}

inline AffineModel<Rational> affine_model(int p, int k) {
    return restrict_model(standard_model(p, k));
}

template <class S>
inline Model<S> cast_model(const Model<Rational>& m) {
    Model<S> out;
    out.p = m.p;
    out.dim = m.dim;
    out.inner = Matrix<S>(m.dim, m.dim);
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) out.inner.at(i, j) = scalar_cast<S>(m.inner.at(i, j));
    for (auto& t : m.tensors) out.tensors.push_back(t.template cast<S>());
    return out;
}

template <class S>
inline AffineModel<S> cast_affine(const AffineModel<Rational>& m) {
    AffineModel<S> out;
    out.p = m.p;
    out.dim = m.dim;
    for (auto& t : m.tensors) out.tensors.push_back(t.template cast<S>());
    return out;
}

// True when every entry of g and nabla^0..k R evaluates exactly at P (only
// exp terms away from y=0 obstruct this).
inline bool can_extract_exactly(const Manifold& man, const Point& P) {
    return !man.potential().has_exp() || P.at(kYVar) == 0;
}

template <class S>
inline Model<S> extract_model(Manifold& man, const Point& P, int k) {
    const Coordinates& co = man.coords();
    Model<S> m;
    m.p = co.p;
    m.dim = co.dim();
    m.inner = Matrix<S>(m.dim, m.dim);
    auto eval = [&](const Expr& e) -> S {
        if constexpr (ScalarTraits<S>::exact) {
            auto v = e.evaluate_exact(P);
            if (!v) throw std::domain_error("exact evaluation impossible at this point");
            return *v;
        } else {
            return e.evaluate_double(P);
        }
    };
    for (auto& [ab, e] : man.metric_entries()) m.inner.at(ab.first, ab.second) = eval(e);
    for (int i = 0; i <= k; ++i) {
        const TensorField& f = man.curvature(i);
        SparseTensor<S> t(m.dim, 4 + i);
        for (auto& [idx, e] : f.entries) t.set(idx, eval(e));
        m.tensors.push_back(std::move(t));
    }
    return m;
}

struct IsoCheck {
    bool ok = false;
    double residual = 0;
};

namespace detail {
template <class S>
inline bool close(const S& a, const S& b, double tol, double& worst) {
    double d = ScalarTraits<S>::magnitude(a - b);
    if (d > worst) worst = d;
    if constexpr (ScalarTraits<S>::exact) return a == b;
    else return d <= tol;
}
} // namespace detail

// phi maps m1's space into m2's space (columns are images); the check is
// phi*(m2 data) == m1 data.
template <class S>
inline IsoCheck verify_isomorphism(const Matrix<S>& phi, const Model<S>& m1, const Model<S>& m2,
                                   double tol = 1e-9) {
    if (m1.dim != m2.dim || phi.rows() != m1.dim || phi.cols() != m1.dim)
        throw std::invalid_argument("dimension mismatch");
    IsoCheck out;
    out.ok = true;
    Matrix<S> pulled = phi.transpose() * m2.inner * phi;
    for (int i = 0; i < m1.dim; ++i)
        for (int j = 0; j < m1.dim; ++j)
            out.ok &= detail::close(pulled.at(i, j), m1.inner.at(i, j), tol, out.residual);
    size_t n = std::min(m1.tensors.size(), m2.tensors.size());
    if (m1.tensors.size() != m2.tensors.size()) out.ok = false;
    for (size_t i = 0; i < n; ++i) {
        SparseTensor<S> pt = m2.tensors[i].pullback(phi);
        double d = pt.max_abs_diff(m1.tensors[i]);
        if (d > out.residual) out.residual = d;
        if constexpr (ScalarTraits<S>::exact) out.ok &= (pt == m1.tensors[i]);
        else out.ok &= (d <= tol);
    }
    return out;
}

template <class S>
inline IsoCheck verify_isomorphism(const Matrix<S>& phi, const AffineModel<S>& m1,
                                   const AffineModel<S>& m2, double tol = 1e-9) {
    if (m1.dim != m2.dim || phi.rows() != m1.dim || phi.cols() != m1.dim)
        throw std::invalid_argument("dimension mismatch");
    IsoCheck out;
    out.ok = m1.tensors.size() == m2.tensors.size();
    size_t n = std::min(m1.tensors.size(), m2.tensors.size());
    for (size_t i = 0; i < n; ++i) {
        SparseTensor<S> pt = m2.tensors[i].pullback(phi);
        double d = pt.max_abs_diff(m1.tensors[i]);
        if (d > out.residual) out.residual = d;
        if constexpr (ScalarTraits<S>::exact) out.ok &= (pt == m1.tensors[i]);
        else out.ok &= (d <= tol);
    }
    return out;
}

struct NormalizeReport {
    enum class Status { Success, NoSolution };
    Status status = Status::NoSolution;
    std::string obstruction;       // why the staged solve or verification failed
    bool exact = false;            // exact_map is valid and the residual is exactly zero
    Matrix<Rational> exact_map;
    Matrix<double> float_map;      // valid on every success
    double residual = 0;
};

namespace detail {

enum class StageCode { Ok, NoSolution, NeedsFloat };

template <class S>
struct StageOutcome {
    StageCode code = StageCode::NoSolution;
    std::string reason;
    Matrix<S> map;
};

// Builds the frame X^=a x, Y^=b(y+sum l_i z_i+u yt), Z^_i, Yt^, Zt^_l from the
// model's own tensor data (scalings fixed by the top tensors, the z-mixing by
// the rank-5..4+p ones), then completes it with starred columns that restore
// the unit pairings.  Solve first, verify after: the caller re-checks the
// produced map against the target model.
template <class S>
inline StageOutcome<S> stage_normalize(const Model<S>& m, int p, int k) {
    StageOutcome<S> out;
    Coordinates co(p);
    int D = co.dim(), h = co.half();
    auto basis = [&](int c) {
        std::vector<S> v(size_t(D), S(0));
        v[size_t(c)] = S(1);
        return v;
    };
    auto fail = [&](const std::string& r) {
        out.code = StageCode::NoSolution;
        out.reason = r;
        return out;
    };
    if (int(m.tensors.size()) != k + 1 || m.dim != D)
        return fail("model does not carry tensors A^0..A^k at this dimension");

    const SparseTensor<S>& A0 = m.tensors[0];
    std::vector<S> ex = basis(co.x()), ey = basis(co.y()), eyt = basis(co.ytilde());
    auto H0 = [&](const std::vector<S>& u, const std::vector<S>& v) {
        return A0.evaluate({ex, u, v, ex});
    };

    int J = std::min(k, p);
    Matrix<S> M(J, p);
    std::vector<S> q(static_cast<size_t>(J));
    for (int j = 1; j <= J; ++j) {
        std::vector<std::vector<S>> args = {ex, ey, ey, ex};
        for (int s = 0; s < j; ++s) args.push_back(ey);
        q[size_t(j - 1)] = m.tensors[size_t(j)].evaluate(args);
        for (int l = 1; l <= p; ++l) {
            args[2] = basis(co.z(l));
            M.at(j - 1, l - 1) = m.tensors[size_t(j)].evaluate(args);
        }
    }
    std::vector<S> rhs(static_cast<size_t>(J));
    for (int j = 1; j <= J; ++j) rhs[size_t(j - 1)] = -q[size_t(j - 1)] / S(j + 2);
    auto lambda = M.solve(rhs);
    if (!lambda) return fail("the Y-direction drift cannot be absorbed into the Z span");

    std::vector<S> v = ey;
    for (int l = 1; l <= p; ++l) v[size_t(co.z(l))] = (*lambda)[size_t(l - 1)];

    S alpha_sq(1), beta(1);
    if (k >= p + 1) {
        auto top = [&](int j) {
            std::vector<std::vector<S>> args = {ex, v, v, ex};
            for (int s = 0; s < j; ++s) args.push_back(v);
            return m.tensors[size_t(j)].evaluate(args);
        };
        S t1 = top(p + 1);
        if (ScalarTraits<S>::is_zero(t1)) return fail("vanishing order-(p+3) derivative data");
        if (k == p + 1) {
            alpha_sq = S(1) / t1;
        } else {
            S t2 = top(p + 2);
            if (ScalarTraits<S>::is_zero(t2)) return fail("vanishing order-(p+4) derivative data");
            beta = t1 / t2;
            S bp = beta;
            for (int i = 0; i < p + 2; ++i) bp *= beta;
            alpha_sq = S(1) / (bp * t1);
        }
    }

    // rows of C_z: particular solutions for i <= J, kernel directions above
    Matrix<S> Cz(p, p);
    std::vector<std::vector<S>> ker = M.nullspace();
    size_t next_ker = 0;
    for (int i = 1; i <= p; ++i) {
        if (i <= J) {
            std::vector<S> r(size_t(J), S(0));
            S scale = alpha_sq;
            for (int t = 0; t < i + 1; ++t) scale *= beta;
            r[size_t(i - 1)] = S(1) / scale;
            auto ci = M.solve(r);
            if (!ci)
                return fail("no Z_" + std::to_string(i) +
                            " candidate: the rank-" + std::to_string(4 + i) +
                            " tensor cannot reach the unit component");
            for (int l = 0; l < p; ++l) Cz.at(i - 1, l) = (*ci)[size_t(l)];
        } else {
            if (next_ker >= ker.size()) return fail("z-mixing matrix cannot be completed");
            for (int l = 0; l < p; ++l) Cz.at(i - 1, l) = ker[next_ker][size_t(l)];
            ++next_ker;
        }
    }

    S w = H0(v, eyt);
    if (ScalarTraits<S>::is_zero(w)) return fail("degenerate pairing between Y and Yt directions");
    S u = -H0(v, v) / (S(2) * w);

    std::vector<std::vector<S>> chat(static_cast<size_t>(p));
    std::vector<S> ecorr(static_cast<size_t>(p));
    for (int i = 1; i <= p; ++i) {
        std::vector<S> c(size_t(D), S(0));
        for (int l = 1; l <= p; ++l) c[size_t(co.z(l))] = Cz.at(i - 1, l - 1);
        ecorr[size_t(i - 1)] = -H0(v, c) / w;
        chat[size_t(i - 1)] = std::move(c);
    }

    auto czinv = Cz.inverse();
    if (!czinv) return fail("z-mixing matrix is singular");
    Matrix<S> Ct = czinv->transpose();
    for (int l = 0; l < p; ++l)
        for (int mcol = 0; mcol < p; ++mcol) Ct.at(l, mcol) = Ct.at(l, mcol) / alpha_sq;

    S alpha;
    if constexpr (ScalarTraits<S>::exact) {
        auto r = rational_sqrt(alpha_sq);
        if (!r) {
            out.code = StageCode::NeedsFloat;
            out.reason = "scaling of the null direction is an irrational square root";
            return out;
        }
        alpha = *r;
    } else {
        if (alpha_sq <= 0) return fail("negative square scaling");
        alpha = std::sqrt(alpha_sq);
    }

    // unstarred frame columns in standard basis order X,Y,Z_i,Yt,Zt_l
    std::vector<std::vector<S>> cols(size_t(h), std::vector<S>(size_t(D), S(0)));
    cols[0][size_t(co.x())] = alpha;
    for (int c = 0; c < D; ++c) cols[1][size_t(c)] = beta * v[size_t(c)];
    cols[1][size_t(co.ytilde())] += beta * u;
    for (int i = 1; i <= p; ++i) {
        cols[size_t(co.z(i))] = chat[size_t(i - 1)];
        cols[size_t(co.z(i))][size_t(co.ytilde())] += ecorr[size_t(i - 1)];
    }
    cols[size_t(co.ytilde())][size_t(co.ytilde())] = S(1) / (alpha_sq * beta * w);
    for (int l = 1; l <= p; ++l) {
        auto& col = cols[size_t(co.ztilde(l))];
        S f(0);
        for (int mm = 1; mm <= p; ++mm) {
            col[size_t(co.ztilde(mm))] = Ct.at(l - 1, mm - 1);
            f -= Ct.at(l - 1, mm - 1) * v[size_t(co.z(mm))];
        }
        col[size_t(co.ytilde())] += f / w;
    }

    // starred completion: C holds the unstarred components of the frame
    Matrix<S> C(h, h);
    for (int j = 0; j < h; ++j)
        for (int a = 0; a < h; ++a) C.at(a, j) = cols[size_t(j)][size_t(a)];
    auto cti = C.transpose().inverse();
    if (!cti) return fail("frame is singular");
    Matrix<S> G(h, h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) {
            S acc(0);
            for (int a = 0; a < D; ++a) {
                if (ScalarTraits<S>::is_zero(cols[size_t(i)][size_t(a)])) continue;
                for (int b = 0; b < D; ++b)
                    acc += cols[size_t(i)][size_t(a)] * m.inner.at(a, b) * cols[size_t(j)][size_t(b)];
            }
            G.at(i, j) = acc;
        }
    Matrix<S> K = *cti * G;
    Rational mhalf(-1, 2);
    S factor = scalar_cast<S>(mhalf);
    out.map = Matrix<S>(D, D);
    for (int j = 0; j < h; ++j) {
        for (int a = 0; a < D; ++a) out.map.at(a, j) = cols[size_t(j)][size_t(a)];
        for (int mm = 0; mm < h; ++mm)
            out.map.at(co.dual(mm), j) += factor * K.at(mm, j);
        for (int mm = 0; mm < h; ++mm)
            out.map.at(co.dual(mm), h + j) = cti->at(mm, j);
    }
    out.code = StageCode::Ok;
    return out;
}

} // namespace detail

inline NormalizeReport normalize_to_standard(const Model<double>& m, int p, int k,
                                             double tol = 1e-9) {
    NormalizeReport rep;
    auto st = detail::stage_normalize<double>(m, p, k);
    if (st.code != detail::StageCode::Ok) {
        rep.obstruction = st.reason;
        return rep;
    }
    Model<double> target = cast_model<double>(standard_model(p, k));
    IsoCheck chk = verify_isomorphism(st.map, target, m, tol);
    rep.residual = chk.residual;
    if (!chk.ok) {
        rep.obstruction = "candidate frame fails verification (residual " +
                          double_to_string(chk.residual) + ")";
        return rep;
    }
    rep.status = NormalizeReport::Status::Success;
    rep.float_map = st.map;
    return rep;
}

inline NormalizeReport normalize_to_standard(const Model<Rational>& m, int p, int k,
                                             double tol = 1e-9) {
    NormalizeReport rep;
    auto st = detail::stage_normalize<Rational>(m, p, k);
    if (st.code == detail::StageCode::NeedsFloat)
        return normalize_to_standard(cast_model<double>(m), p, k, tol);
    if (st.code != detail::StageCode::Ok) {
        rep.obstruction = st.reason;
        return rep;
    }
    Model<Rational> target = standard_model(p, k);
    IsoCheck chk = verify_isomorphism(st.map, target, m);
    rep.residual = chk.residual;
    if (!chk.ok) {
        rep.obstruction = "candidate frame fails verification (residual " +
                          double_to_string(chk.residual) + ")";
        return rep;
    }
    rep.status = NormalizeReport::Status::Success;
    rep.exact = true;
    rep.exact_map = st.map;
    rep.float_map = Matrix<double>(m.dim, m.dim);
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) rep.float_map.at(i, j) = to_double(st.map.at(i, j));
    return rep;
}

} // namespace curvhom

#endif
