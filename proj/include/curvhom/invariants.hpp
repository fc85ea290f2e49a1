#ifndef CURVHOM_INVARIANTS_HPP
#define CURVHOM_INVARIANTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "models.hpp"

namespace curvhom {

// F = psi(y) + sum_i z_i y^{i+1}; everything below is a function of psi alone.
struct PsiProfile {
    int p = 1;
    Expr psi;
};

inline void validate_profile(const PsiProfile& prof) {
    if (prof.p < 1) throw std::invalid_argument("p must be >= 1");
    if (!prof.psi.depends_only_on_y())
        throw std::invalid_argument("profile function must depend on y only");
}

inline Expr psi_derivative(const PsiProfile& prof, int order) {
    Expr d = prof.psi;
    for (int i = 0; i < order; ++i) d = d.derivative(kYVar);
    return d;
}

// alpha_nu = psi^(nu+p+3) * (psi^(p+3))^(nu-1) / (psi^(p+4))^nu, kept as an
// exact numerator/denominator pair of y-functions.
struct AlphaExpr {
    Expr num;
    Expr den;
};

inline AlphaExpr alpha(const PsiProfile& prof, int nu) {
    validate_profile(prof);
    if (nu < 1) throw std::invalid_argument("nu must be >= 1");
    AlphaExpr out;
    out.num = psi_derivative(prof, nu + prof.p + 3) * psi_derivative(prof, prof.p + 3).pow(nu - 1);
    out.den = psi_derivative(prof, prof.p + 4).pow(nu);
    return out;
}

// nullopt when exponential terms block exact evaluation away from y = 0
inline std::optional<Rational> alpha_value_exact(const PsiProfile& prof, int nu,
                                                 const Rational& y) {
    AlphaExpr ae = alpha(prof, nu);
    Point P;
    P.v[kYVar] = y;
    auto n = ae.num.evaluate_exact(P);
    auto d = ae.den.evaluate_exact(P);
    if (!n || !d) return std::nullopt;
    if (*d == 0) throw std::domain_error("alpha undefined: denominator vanishes");
    return *n / *d;
}

inline double alpha_value_double(const PsiProfile& prof, int nu, const Rational& y) {
    AlphaExpr ae = alpha(prof, nu);
    Point P;
    P.v[kYVar] = y;
    double d = ae.den.evaluate_double(P);
    if (d == 0) throw std::domain_error("alpha undefined: denominator vanishes");
    return ae.num.evaluate_double(P) / d;
}

// alpha_nu is constant iff num' den - num den' is the zero function
inline bool alpha_is_constant(const PsiProfile& prof, int nu) {
    AlphaExpr ae = alpha(prof, nu);
    Expr wronskian = ae.num.derivative(kYVar) * ae.den - ae.num * ae.den.derivative(kYVar);
    return wronskian.is_zero();
}

enum class PsiVerdict { Inadmissible, HomogeneousExcluded, AdmissibleNonhomogeneous, Inconclusive };

inline std::string verdict_name(PsiVerdict v) {
    switch (v) {
        case PsiVerdict::Inadmissible: return "inadmissible";
        case PsiVerdict::HomogeneousExcluded: return "homogeneous-excluded";
        case PsiVerdict::AdmissibleNonhomogeneous: return "admissible-nonhomogeneous";
        default: return "inconclusive";
    }
}

// sample points used for the positivity screen; the verdict is only as strong
// as this grid and the checks say so in their wording
inline std::vector<Rational> classification_grid() {
    return {Rational(-2), Rational(-1), Rational(-1, 2), Rational(0),
            Rational(1, 2), Rational(1), Rational(2)};
}

struct ClassifyReport {
    PsiVerdict verdict = PsiVerdict::Inconclusive;
    std::string detail;
    int witness_nu = 0; // first nu with nonconstant alpha_nu, when one exists
};

inline ClassifyReport classify(const PsiProfile& prof, int nu_max = 6) {
    validate_profile(prof);
    if (nu_max < 2) throw std::invalid_argument("nu_max must be >= 2");
    ClassifyReport rep;
    Expr d3 = psi_derivative(prof, prof.p + 3);
    Expr d4 = psi_derivative(prof, prof.p + 4);
    for (auto& y : classification_grid()) {
        Point P;
        P.v[kYVar] = y;
        for (auto [e, ord] : {std::pair<const Expr*, int>{&d3, prof.p + 3}, {&d4, prof.p + 4}}) {
            if (e->evaluate_double(P) <= 0) {
                rep.verdict = PsiVerdict::Inadmissible;
                rep.detail = "derivative of order " + std::to_string(ord) +
                             " is not strictly positive at y = " + rational_to_string(y);
                return rep;
            }
        }
    }
    if (d3.terms().size() == 1) {
        const auto& [mono, coef] = *d3.terms().begin();
        if (mono.pows.empty() && mono.expn != 0 && coef > 0) {
            rep.verdict = PsiVerdict::HomogeneousExcluded;
            rep.detail = "derivative of order " + std::to_string(prof.p + 3) +
                         " is a single exponential, so every alpha_nu is constant";
            return rep;
        }
    }
    for (int nu = 2; nu <= nu_max; ++nu) {
        if (!alpha_is_constant(prof, nu)) {
            rep.verdict = PsiVerdict::AdmissibleNonhomogeneous;
            rep.witness_nu = nu;
            rep.detail = "alpha_" + std::to_string(nu) + " is nonconstant";
            return rep;
        }
    }
    rep.verdict = PsiVerdict::Inconclusive;
    rep.detail = "alpha_2 .. alpha_" + std::to_string(nu_max) +
                 " are all constant on the tested range; no structural exclusion applies";
    return rep;
}

struct AlphaCurvatureCheck {
    bool ok = false;
    double model_value = 0;  // top-order component read through the normalized frame
    double alpha_value = 0;  // the closed formula at the same point
    double rel_error = 0;
    bool exact = false;      // the exact cross-check below was performed
    Rational exact_model;
    Rational exact_alpha;
    std::string detail;
};

namespace detail {

template <class S>
inline S all_y_value(const Model<S>& m, int j, const Coordinates& co) {
    std::vector<S> ex(size_t(co.dim()), S(0)), ey(size_t(co.dim()), S(0));
    ex[size_t(co.x())] = S(1);
    ey[size_t(co.y())] = S(1);
    std::vector<std::vector<S>> args = {ex, ey, ey, ex};
    for (int s = 0; s < j; ++s) args.push_back(ey);
    return m.tensors.at(size_t(j)).evaluate(args);
}

} // namespace detail

// Builds the metric for this profile, extracts the model at P to order
// nu+p+1, normalizes the order-(p+2) part to the standard frame, reads the
// all-Y component of the top tensor through that frame, and compares it with
// alpha_nu(y(P)).  When the point admits exact evaluation, an exact value is
// computed as well (the scalings enter the all-Y component only through
// ratios of the three top all-Y readings, so no square root is needed).
inline AlphaCurvatureCheck verify_alpha_as_curvature(const PsiProfile& prof, int nu,
                                                     const Point& P, double tol = 1e-8) {
    validate_profile(prof);
    if (nu < 1) throw std::invalid_argument("nu must be >= 1");
    int p = prof.p;
    Coordinates co(p);
    int top = nu + p + 1;
    AlphaCurvatureCheck out;

    Manifold man(p, psi_family_F(p, prof.psi));
    Model<double> full = extract_model<double>(man, P, top);
    Model<double> low;
    low.p = full.p;
    low.dim = full.dim;
    low.inner = full.inner;
    low.tensors.assign(full.tensors.begin(), full.tensors.begin() + (p + 3));
    NormalizeReport rep = normalize_to_standard(low, p, p + 2);
    if (rep.status != NormalizeReport::Status::Success) {
        out.detail = "normalization failed: " + rep.obstruction;
        return out;
    }
    std::vector<double> colX(size_t(co.dim())), colY(size_t(co.dim()));
    for (int r = 0; r < co.dim(); ++r) {
        colX[size_t(r)] = rep.float_map.at(r, co.x());
        colY[size_t(r)] = rep.float_map.at(r, co.y());
    }
    std::vector<std::vector<double>> args = {colX, colY, colY, colX};
    for (int s = 0; s < top; ++s) args.push_back(colY);
    out.model_value = full.tensors.at(size_t(top)).evaluate(args);
    out.alpha_value = alpha_value_double(prof, nu, P.at(kYVar));
    double denom = std::max(std::abs(out.alpha_value), 1e-30);
    out.rel_error = std::abs(out.model_value - out.alpha_value) / denom;
    out.ok = out.rel_error <= tol;

    if (can_extract_exactly(man, P)) {
        Model<Rational> exm = extract_model<Rational>(man, P, top);
        Rational t1 = detail::all_y_value(exm, p + 1, co);
        Rational t2 = detail::all_y_value(exm, p + 2, co);
        Rational ttop = detail::all_y_value(exm, top, co);
        if (t1 != 0 && t2 != 0) {
            Rational beta = t1 / t2;
            out.exact_model = rational_pow(beta, nu) * ttop / t1;
            auto av = alpha_value_exact(prof, nu, P.at(kYVar));
            if (av) {
                out.exact_alpha = *av;
                out.exact = true;
                out.ok = out.ok && out.exact_model == out.exact_alpha;
                if (out.exact_model != out.exact_alpha)
                    out.detail = "exact cross-check disagrees with the closed formula";
            }
        }
    }
    return out;
}

} // namespace curvhom

#endif
