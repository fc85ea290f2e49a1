#include <catch2/catch_amalgamated.hpp>

#include <curvhom/coords.hpp>
#include <curvhom/expr.hpp>

using namespace curvhom;

namespace {

Expr yv() { return Expr::var(1); }
Expr zv(int p, int i) { return Expr::var(Coordinates(p).z(i)); }

} // namespace

TEST_CASE("polynomial differentiation") {
    Coordinates co(1);
    Expr f = zv(1, 1) * yv().pow(2); // z1 y^2

    Expr fy = f.derivative(co.y());
    REQUIRE(fy == Expr::constant(2) * zv(1, 1) * yv());

    Expr fz = f.derivative(co.z(1));
    REQUIRE(fz == yv().pow(2));

    // mixed partials commute
    REQUIRE(fy.derivative(co.z(1)) == fz.derivative(co.y()));
    REQUIRE(fy.derivative(co.z(1)) == Expr::constant(2) * yv());

    // absent variable
    REQUIRE(f.derivative(co.ytilde()).is_zero());
    REQUIRE(Expr::constant(7).derivative(co.y()).is_zero());
}

TEST_CASE("exponential differentiation") {
    Coordinates co(1);
    REQUIRE(Expr::exp_y(2).derivative(co.y()) == Expr::constant(2) * Expr::exp_y(2));
    REQUIRE(Expr::exp_y(-1).derivative(co.y()) == Expr::constant(-1) * Expr::exp_y(-1));
    REQUIRE(Expr::exp_y(3).derivative(co.z(1)).is_zero());

    Expr f = yv() * Expr::exp_y(1);
    REQUIRE(f.derivative(co.y()) == Expr::exp_y(1) + yv() * Expr::exp_y(1));
}

TEST_CASE("product rule") {
    Coordinates co(1);
    std::vector<Expr> samples = {
        yv().pow(3),
        zv(1, 1) * yv() + Expr::constant(make_rational(1, 2)),
        Expr::exp_y(2) + yv(),
        Expr::exp_y(-1) * zv(1, 1),
        Expr::var(co.ytilde()) * yv() - Expr::constant(3),
    };
    for (auto& f : samples)
        for (auto& g : samples) {
            Expr lhs = (f * g).derivative(co.y());
            Expr rhs = f.derivative(co.y()) * g + f * g.derivative(co.y());
            REQUIRE(lhs == rhs);
        }
}

TEST_CASE("evaluation") {
    Coordinates co(1);
    Expr f = zv(1, 1) * yv().pow(2) + Expr::constant(3);

    Point P;
    P.v[co.y()] = Rational(2);
    P.v[co.z(1)] = make_rational(1, 2);
    auto ex = f.evaluate_exact(P);
    REQUIRE(ex);
    REQUIRE(*ex == Rational(5));
    REQUIRE(f.evaluate_double(P) == Catch::Approx(5.0).epsilon(1e-14));

    // exp factors evaluate exactly only where their argument vanishes
    Expr g = Expr::exp_y(2) + yv();
    Point O;
    auto e0 = g.evaluate_exact(O);
    REQUIRE(e0);
    REQUIRE(*e0 == Rational(1));
    REQUIRE_FALSE(g.evaluate_exact(P));

    Point Y1;
    Y1.v[co.y()] = Rational(1);
    REQUIRE(Expr::exp_y(1).evaluate_double(Y1) == Catch::Approx(2.718281828459045).epsilon(1e-15));
    REQUIRE(g.evaluate_double(Y1) == Catch::Approx(std::exp(2.0) + 1.0).epsilon(1e-14));
}

TEST_CASE("shift in y") {
    Coordinates co(1);
    Expr f = yv().pow(3);
    auto s = f.shift_y(Rational(2));
    REQUIRE(s);
    REQUIRE(*s == yv().pow(3) + Expr::constant(6) * yv().pow(2) + Expr::constant(12) * yv() +
                      Expr::constant(8));

    // a shifted polynomial evaluates like the original at the shifted point
    Expr g = zv(1, 1) * yv().pow(2) - yv() + Expr::constant(make_rational(2, 3));
    Rational c = make_rational(-3, 2);
    auto gs = g.shift_y(c);
    REQUIRE(gs);
    for (int t = -2; t <= 2; ++t) {
        Point A, B;
        A.v[co.y()] = Rational(t);
        A.v[co.z(1)] = make_rational(5, 7);
        B = A;
        B.v[co.y()] = Rational(t) + c;
        REQUIRE(*gs->evaluate_exact(A) == *g.evaluate_exact(B));
    }

    REQUIRE_FALSE((Expr::exp_y(1) + yv()).shift_y(Rational(1)));
}

TEST_CASE("canonical arithmetic") {
    Expr y = yv();
    REQUIRE((y + Expr::constant(1)) * (y - Expr::constant(1)) == y.pow(2) - Expr::constant(1));
    REQUIRE((y - y).is_zero());
    REQUIRE((Expr::exp_y(1) * Expr::exp_y(2)) == Expr::exp_y(3));

    Expr f = zv(1, 1) * y.pow(2);
    REQUIRE(f.total_degree() == 3);
    REQUIRE(Expr::constant(4).total_degree() == 0);
    REQUIRE(Expr().total_degree() == -1);

    REQUIRE(Expr::constant(make_rational(3, 4)).is_constant());
    REQUIRE(Expr::constant(make_rational(3, 4)).constant_value() == make_rational(3, 4));
    REQUIRE_FALSE(y.is_constant());
    REQUIRE_THROWS_AS(y.constant_value(), std::logic_error);

    REQUIRE(Expr::exp_y(1).has_exp());
    REQUIRE_FALSE(y.has_exp());
    REQUIRE_THROWS_AS(y.pow(-1), std::invalid_argument);
}

TEST_CASE("printing") {
    Coordinates co(2);
    REQUIRE(Expr().to_string(co) == "0");
    REQUIRE(Expr::constant(make_rational(-3, 2)).to_string(co) == "-3/2");
    REQUIRE((Expr::var(co.z(1)) * Expr::var(co.y()).pow(2)).to_string(co) == "y^2*z1");
    REQUIRE((Expr::constant(-1) * Expr::var(co.y())).to_string(co) == "-y");
    REQUIRE(Expr::exp_y(1).to_string(co) == "exp(y)");
    REQUIRE(Expr::exp_y(-2).to_string(co) == "exp(-2*y)");
    Expr mix = Expr::var(co.y()) - Expr::constant(make_rational(1, 2)) * Expr::exp_y(2);
    REQUIRE(mix.to_string(co) == "y - 1/2*exp(2*y)");
}

TEST_CASE("variable domain guards") {
    Coordinates co(2);
    Expr ok = Expr::var(co.z(2)) * Expr::var(co.y());
    REQUIRE(ok.depends_only_on_y_z(co));
    REQUIRE_FALSE(ok.depends_only_on_y());

    Expr bad = Expr::var(co.ytilde()) * Expr::var(co.y());
    REQUIRE_FALSE(bad.depends_only_on_y_z(co));

    REQUIRE(yv().depends_only_on_y());
    REQUIRE(Expr::exp_y(1).depends_only_on_y());
}
