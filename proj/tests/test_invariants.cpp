#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <curvhom/invariants.hpp>

using namespace curvhom;

namespace {

Expr yv() { return Expr::var(kYVar); }

PsiProfile two_exp(int p = 1) {
    return PsiProfile{p, Expr::exp_y(1) + Expr::exp_y(2)};
}

} // namespace

TEST_CASE("pure exponentials telescope to constant alpha") {
    for (int m : {1, 2, 3}) {
        PsiProfile prof{1, Expr::exp_y(m)};
        for (int nu = 1; nu <= 4; ++nu) {
            REQUIRE(alpha_is_constant(prof, nu));
            auto v = alpha_value_exact(prof, nu, 0);
            REQUIRE(v);
            REQUIRE(*v == 1);
        }
    }
    PsiProfile scaled{2, Expr::constant(3) * Expr::exp_y(2)};
    REQUIRE(alpha_is_constant(scaled, 2));
    REQUIRE(*alpha_value_exact(scaled, 2, 0) == 1);
}

TEST_CASE("two-exponential profile") {
    PsiProfile prof = two_exp();

    Point origin;
    for (int n = 0; n <= 8; ++n) {
        auto v = psi_derivative(prof, n).evaluate_exact(origin);
        REQUIRE(v);
        REQUIRE(*v == Rational(1 + (1 << n)));
    }

    auto a2 = alpha_value_exact(prof, 2, 0);
    REQUIRE(a2);
    REQUIRE(*a2 == make_rational(1105, 1089));
    REQUIRE(alpha_value_double(prof, 2, 0) ==
            Catch::Approx(1105.0 / 1089.0).epsilon(1e-14));
    REQUIRE_FALSE(alpha_is_constant(prof, 2));

    // away from the origin only the float path is available
    REQUIRE_FALSE(alpha_value_exact(prof, 2, 1).has_value());
    REQUIRE(std::isfinite(alpha_value_double(prof, 2, 1)));
}

TEST_CASE("alpha ignores absorbable polynomial parts") {
    PsiProfile prof = two_exp();
    PsiProfile shifted{1, prof.psi + yv().pow(3) - Expr::constant(2) * yv().pow(2) +
                              yv() - Expr::constant(7)};
    for (int nu = 1; nu <= 3; ++nu) {
        AlphaExpr a = alpha(prof, nu);
        AlphaExpr b = alpha(shifted, nu);
        REQUIRE(a.num == b.num);
        REQUIRE(a.den == b.den);
    }
}

TEST_CASE("alpha commutes with translation in y") {
    PsiProfile prof{1, yv().pow(6) + yv().pow(5)};
    auto moved = prof.psi.shift_y(make_rational(1, 2));
    REQUIRE(moved);
    PsiProfile prof2{1, *moved};
    for (Rational y : {Rational(0), Rational(1), Rational(-1), make_rational(1, 3)}) {
        auto lhs = alpha_value_exact(prof2, 2, y);
        auto rhs = alpha_value_exact(prof, 2, y + make_rational(1, 2));
        REQUIRE(lhs);
        REQUIRE(rhs);
        REQUIRE(*lhs == *rhs);
    }
}

TEST_CASE("profile classification") {
    ClassifyReport adm = classify(two_exp());
    REQUIRE(adm.verdict == PsiVerdict::AdmissibleNonhomogeneous);
    REQUIRE(adm.witness_nu == 2);
    REQUIRE(verdict_name(adm.verdict) == "admissible-nonhomogeneous");

    REQUIRE(classify({1, Expr::exp_y(1)}).verdict == PsiVerdict::HomogeneousExcluded);
    REQUIRE(classify({1, Expr::constant(3) * Expr::exp_y(2)}).verdict ==
            PsiVerdict::HomogeneousExcluded);
    // a polynomial part of degree <= p+2 is invisible at the screened orders
    REQUIRE(classify({1, Expr::exp_y(1) + yv().pow(3)}).verdict ==
            PsiVerdict::HomogeneousExcluded);

    REQUIRE(classify({1, -Expr::exp_y(1)}).verdict == PsiVerdict::Inadmissible);
    ClassifyReport flat = classify({1, yv().pow(4)});
    REQUIRE(flat.verdict == PsiVerdict::Inadmissible);
    REQUIRE(flat.detail.find("order 5") != std::string::npos);
    REQUIRE(classify({1, Expr::exp_y(-1)}).verdict == PsiVerdict::Inadmissible);

    // a shifted power keeps every alpha constant without being exponential
    ClassifyReport open = classify({1, (yv() + Expr::constant(3)).pow(9)});
    REQUIRE(open.verdict == PsiVerdict::Inconclusive);
    REQUIRE(verdict_name(open.verdict) == "inconclusive");
    REQUIRE(open.detail.find("no structural exclusion") != std::string::npos);

    REQUIRE_THROWS_AS(classify(two_exp(), 1), std::invalid_argument);
}

TEST_CASE("invariant guards") {
    PsiProfile bad{1, Expr::var(2)};
    REQUIRE_THROWS_AS(validate_profile(bad), std::invalid_argument);
    REQUIRE_THROWS_AS(validate_profile(PsiProfile{0, Expr::exp_y(1)}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(alpha(two_exp(), 0), std::invalid_argument);
    // vanishing denominator derivative
    REQUIRE_THROWS_AS(alpha_value_exact({1, yv().pow(4)}, 2, 0), std::domain_error);
}

TEST_CASE("alpha appears as a normalized curvature component") {
    PsiProfile prof = two_exp();

    Point origin;
    AlphaCurvatureCheck at0 = verify_alpha_as_curvature(prof, 2, origin);
    INFO(at0.detail);
    REQUIRE(at0.ok);
    REQUIRE(at0.exact);
    REQUIRE(at0.exact_model == make_rational(1105, 1089));
    REQUIRE(at0.exact_alpha == make_rational(1105, 1089));
    REQUIRE(at0.rel_error < 1e-8);

    for (int nu : {2, 3}) {
        for (Rational y : {make_rational(1, 2), Rational(-1)}) {
            Point P;
            P.v[kYVar] = y;
            AlphaCurvatureCheck chk = verify_alpha_as_curvature(prof, nu, P);
            INFO("nu = " << nu << " y = " << rational_to_string(y) << ": " << chk.detail);
            REQUIRE(chk.ok);
            REQUIRE(chk.rel_error < 1e-8);
        }
    }

    PsiProfile prof2 = two_exp(2);
    Point P;
    P.v[kYVar] = make_rational(1, 3);
    AlphaCurvatureCheck chk = verify_alpha_as_curvature(prof2, 3, P);
    INFO(chk.detail);
    REQUIRE(chk.ok);

    REQUIRE_THROWS_AS(verify_alpha_as_curvature(prof, 0, origin), std::invalid_argument);
}
