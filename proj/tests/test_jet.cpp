#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gman/jet.hpp"

using namespace gman;

TEST_CASE("variable jets carry exact first derivatives") {
    const JetSpace& sp = JetSpace::get(2, 3);
    Jet x = Jet::variable(sp, 0, 2.0);
    Jet y = Jet::variable(sp, 1, -3.0);
    REQUIRE(x.value() == 2.0);
    REQUIRE(x.d(0) == 1.0);
    REQUIRE(x.d(1) == 0.0);
    REQUIRE(y.d(1) == 1.0);
}

TEST_CASE("product rule is exact on polynomials") {
    const JetSpace& sp = JetSpace::get(2, 3);
    Jet x = Jet::variable(sp, 0, 1.5);
    Jet y = Jet::variable(sp, 1, 0.5);
    Jet f = x * x * y + y * y * y; // f = x^2 y + y^3
    CHECK(f.value() == Catch::Approx(1.5 * 1.5 * 0.5 + 0.125).epsilon(1e-15));
    CHECK(f.partial({1, 0}) == Catch::Approx(2 * 1.5 * 0.5));
    CHECK(f.partial({0, 1}) == Catch::Approx(1.5 * 1.5 + 3 * 0.25));
    CHECK(f.partial({2, 0}) == Catch::Approx(2 * 0.5));
    CHECK(f.partial({1, 1}) == Catch::Approx(2 * 1.5));
    CHECK(f.partial({0, 3}) == Catch::Approx(6.0));
    CHECK(f.partial({3, 0}) == Catch::Approx(0.0));
}

TEST_CASE("analytic functions match closed-form derivatives") {
    const JetSpace& sp = JetSpace::get(1, 3);
    double a = 0.7;
    Jet x = Jet::variable(sp, 0, a);

    Jet s = sin(x);
    CHECK(s.partial({1}) == Catch::Approx(std::cos(a)).epsilon(1e-14));
    CHECK(s.partial({2}) == Catch::Approx(-std::sin(a)).epsilon(1e-14));
    CHECK(s.partial({3}) == Catch::Approx(-std::cos(a)).epsilon(1e-14));

    Jet e = exp(x * 2.0);
    CHECK(e.partial({3}) == Catch::Approx(8.0 * std::exp(1.4)).epsilon(1e-14));

    Jet l = log(x);
    CHECK(l.partial({1}) == Catch::Approx(1.0 / a).epsilon(1e-14));
    CHECK(l.partial({2}) == Catch::Approx(-1.0 / (a * a)).epsilon(1e-14));

    Jet r = sqrt(x);
    CHECK(r.partial({1}) == Catch::Approx(0.5 / std::sqrt(a)).epsilon(1e-14));

    Jet q = reciprocal(x);
    CHECK(q.partial({2}) == Catch::Approx(2.0 / (a * a * a)).epsilon(1e-14));

    Jet p = powi(x, 5);
    CHECK(p.partial({2}) == Catch::Approx(20.0 * std::pow(a, 3)).epsilon(1e-14));
    Jet pn = powi(x, -2);
    CHECK(pn.partial({1}) == Catch::Approx(-2.0 * std::pow(a, -3)).epsilon(1e-13));
}

TEST_CASE("domain violations throw") {
    const JetSpace& sp = JetSpace::get(1, 2);
    Jet x = Jet::variable(sp, 0, -1.0);
    CHECK_THROWS_AS(log(x), DomainError);
    CHECK_THROWS_AS(sqrt(x), DomainError);
    Jet z = Jet::variable(sp, 0, 0.0);
    CHECK_THROWS_AS(reciprocal(z), DomainError);
}

TEST_CASE("deriv lowers remaining accuracy") {
    const JetSpace& sp = JetSpace::get(1, 3);
    Jet x = Jet::variable(sp, 0, 0.3);
    Jet f = sin(x);
    Jet f1 = f.deriv(0);
    Jet f2 = f1.deriv(0);
    Jet f3 = f2.deriv(0);
    CHECK(f1.value() == Catch::Approx(std::cos(0.3)).epsilon(1e-14));
    CHECK(f2.value() == Catch::Approx(-std::sin(0.3)).epsilon(1e-14));
    CHECK(f3.value() == Catch::Approx(-std::cos(0.3)).epsilon(1e-14));
}

TEST_CASE("jets agree with order-4 central finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    auto f = [](double x, double y) { return std::sin(x) * std::exp(0.5 * y) + x * x * y; };
    const JetSpace& sp = JetSpace::get(2, 2);
    const double h = 1e-3;
    for (int t = 0; t < 25; ++t) {
        double x0 = U(rng), y0 = U(rng);
        Jet x = Jet::variable(sp, 0, x0);
        Jet y = Jet::variable(sp, 1, y0);
        Jet j = sin(x) * exp(y * 0.5) + x * x * y;
        double fdx =
            (-f(x0 + 2 * h, y0) + 8 * f(x0 + h, y0) - 8 * f(x0 - h, y0) + f(x0 - 2 * h, y0)) / (12 * h);
        double fdy =
            (-f(x0, y0 + 2 * h) + 8 * f(x0, y0 + h) - 8 * f(x0, y0 - h) + f(x0, y0 - 2 * h)) / (12 * h);
        CHECK(std::abs(j.d(0) - fdx) < 1e-9);
        CHECK(std::abs(j.d(1) - fdy) < 1e-9);
    }
}

TEST_CASE("division is consistent with multiplication") {
    const JetSpace& sp = JetSpace::get(2, 3);
    Jet x = Jet::variable(sp, 0, 1.2);
    Jet y = Jet::variable(sp, 1, 0.4);
    Jet f = (x * y + 1.0) / (x + 2.0);
    Jet back = f * (x + 2.0);
    Jet target = x * y + 1.0;
    CHECK(back.value() == Catch::Approx(target.value()).epsilon(1e-14));
    CHECK(back.partial({1, 1}) == Catch::Approx(target.partial({1, 1})).margin(1e-13));
    CHECK(back.partial({2, 1}) == Catch::Approx(target.partial({2, 1})).margin(1e-13));
}
