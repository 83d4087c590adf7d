#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gman/expr.hpp"

using namespace gman;

static const std::vector<std::string> kNames{"x1", "y1", "z1"};

static std::shared_ptr<const Chart> make_chart() {
    return std::make_shared<Chart>(kNames,
                                   std::vector<std::pair<double, double>>{{-1, 1}, {-1, 1}, {-1, 1}},
                                   std::vector<bool>{false, false, false});
}

TEST_CASE("grammar accepts the documented forms") {
    CHECK_NOTHROW(parse("0.1*sin(x1)", kNames));
    CHECK_NOTHROW(parse("x1^2", kNames));
    CHECK_NOTHROW(parse("-x1 + y1*z1 - 2/(1+x1^2)", kNames));
    CHECK_NOTHROW(parse("sqrt(2+cos(y1))*exp(z1/3)", kNames));
    CHECK_NOTHROW(parse("x1^-2", kNames));
}

TEST_CASE("errors carry exact byte offsets") {
    auto offset_of = [](const std::string& s) -> long {
        try {
            parse(s, kNames);
            return -1;
        } catch (const ParseError& e) {
            return static_cast<long>(e.offset);
        }
    };
    CHECK(offset_of("sin(q)") == 4);
    CHECK(offset_of("1+*2") == 2);
    CHECK(offset_of("") == 0);
    CHECK(offset_of("x1 +") == 4);
    CHECK(offset_of("(x1") == 3);
    CHECK(offset_of("x1^y1") == 3);
    CHECK(offset_of("bogus") == 0);
    CHECK(offset_of("x1 y1") == 3); // trailing input
}

TEST_CASE("deep nesting is rejected") {
    std::string deep = "x1";
    for (int i = 0; i < 80; ++i) deep = "(" + deep + ")";
    CHECK_THROWS_AS(parse(deep, kNames), ParseError);
    std::string ok = "x1";
    for (int i = 0; i < 5; ++i) ok = "(" + ok + ")";
    CHECK_NOTHROW(parse(ok, kNames));
}

TEST_CASE("x1^2 has exact jets") {
    auto chart = make_chart();
    // chart box is [-1,1]; evaluate the jets directly at x1 = 3
    auto e = parse("x1^2", kNames);
    const JetSpace& sp = JetSpace::get(3, 3);
    std::vector<Jet> c{Jet::variable(sp, 0, 3.0), Jet::variable(sp, 1, 0.0), Jet::variable(sp, 2, 0.0)};
    Jet v = detail::eval_expr(*e, c);
    CHECK(v.value() == 9.0);
    CHECK(v.partial({1, 0, 0}) == 6.0);
    CHECK(v.partial({2, 0, 0}) == 2.0);
    CHECK(v.partial({3, 0, 0}) == 0.0);
}

TEST_CASE("jets match order-4 central finite differences at 50 random points") {
    auto chart = make_chart();
    auto f = to_field(parse("sin(x1)*y1 + exp(z1/2)*cos(x1*y1)", kNames), chart);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-0.9, 0.9);
    const double h = 1e-3;
    for (int t = 0; t < 50; ++t) {
        Point p{{U(rng), U(rng), U(rng)}};
        Jet j = f.at(p, 1);
        for (int i = 0; i < 3; ++i) {
            auto at = [&](double dx) {
                Point q = p;
                q.x[i] += dx;
                return f.at(q, 0).value();
            };
            double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
            CHECK(std::abs(fd - j.d(i)) < 1e-7);
        }
    }
}

TEST_CASE("parse-print-parse is idempotent") {
    for (const char* src : {"0.1*sin(x1)-y1^3/(2+z1)", "-x1^2+sqrt(1+y1^2)", "exp(x1)*log(2+z1)/3"}) {
        auto e = parse(src, kNames);
        auto printed = print_expr(e);
        auto e2 = parse(printed, kNames);
        CHECK(expr_equal(e, e2));
        CHECK(print_expr(e2) == printed);
    }
}

TEST_CASE("differentiation is linear, exactly") {
    auto chart = make_chart();
    auto A = to_field(parse("sin(x1)*y1", kNames), chart);
    auto B = to_field(parse("z1^3", kNames), chart);
    auto AB = to_field(parse("sin(x1)*y1+z1^3", kNames), chart);
    Point p{{0.3, -0.4, 0.7}};
    Jet sum = A.at(p, 3) + B.at(p, 3);
    Jet jab = AB.at(p, 3);
    CHECK(sum.value() == jab.value());
    for (int i = 0; i < 3; ++i) CHECK(sum.d(i) == jab.d(i));
}

TEST_CASE("domain violations echo the point") {
    auto chart = make_chart();
    auto g = to_field(parse("log(x1)", kNames), chart);
    try {
        g.at(Point{{-0.5, 0.0, 0.0}}, 2);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        std::string msg = e.what();
        CHECK(msg.find("x1=-0.5") != std::string::npos);
    }
    CHECK_NOTHROW(g.at(Point{{0.5, 0.0, 0.0}}, 2));
}
