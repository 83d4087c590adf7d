#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gman/catalog.hpp"
#include "gman/geometry.hpp"

using namespace gman;

namespace {

// Independent curvature oracle: Ricci from nested order-4 central finite
// differences of metric *values* only (no jets beyond order 0).
struct FdOracle {
    const MetricField& g;
    double h;

    DMat gv(const Point& p) const {
        JetMat m = g.at(p, 0);
        const int d = m.rows();
        DMat out(d, DVec(d, 0.0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) out[i][j] = m(i, j).value();
        return out;
    }

    DMat dgv(const Point& p, int k) const {
        auto at = [&](double dx) {
            Point q = p;
            q.x[k] += dx;
            return gv(q);
        };
        DMat a = at(2 * h), b = at(h), c = at(-h), e = at(-2 * h);
        const int d = static_cast<int>(a.size());
        DMat out(d, DVec(d, 0.0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out[i][j] = (-a[i][j] + 8 * b[i][j] - 8 * c[i][j] + e[i][j]) / (12 * h);
        return out;
    }

    // Gamma^l_{ij} at p
    std::vector<DMat> gamma(const Point& p) const {
        DMat G = gv(p);
        const int d = static_cast<int>(G.size());
        // invert G by Gauss-Jordan
        DMat inv(d, DVec(d, 0.0)), A = G;
        for (int i = 0; i < d; ++i) inv[i][i] = 1.0;
        for (int c = 0; c < d; ++c) {
            int piv = c;
            for (int r = c + 1; r < d; ++r)
                if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
            std::swap(A[c], A[piv]);
            std::swap(inv[c], inv[piv]);
            double pv = A[c][c];
            for (int j = 0; j < d; ++j) {
                A[c][j] /= pv;
                inv[c][j] /= pv;
            }
            for (int r = 0; r < d; ++r)
                if (r != c) {
                    double f = A[r][c];
                    for (int j = 0; j < d; ++j) {
                        A[r][j] -= f * A[c][j];
                        inv[r][j] -= f * inv[c][j];
                    }
                }
        }
        std::vector<DMat> dg;
        for (int k = 0; k < d; ++k) dg.push_back(dgv(p, k));
        std::vector<DMat> out(d, DMat(d, DVec(d, 0.0)));
        for (int l = 0; l < d; ++l)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double s = 0.0;
                    for (int k = 0; k < d; ++k)
                        s += 0.5 * inv[l][k] * (dg[i][k][j] + dg[j][k][i] - dg[k][i][j]);
                    out[l][i][j] = s;
                }
        return out;
    }

    std::vector<DMat> dgamma(const Point& p, int k, double hh) const {
        auto at = [&](double dx) {
            Point q = p;
            q.x[k] += dx;
            return gamma(q);
        };
        auto a = at(2 * hh), b = at(hh), c = at(-hh), e = at(-2 * hh);
        const int d = static_cast<int>(a.size());
        std::vector<DMat> out(d, DMat(d, DVec(d, 0.0)));
        for (int l = 0; l < d; ++l)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    out[l][i][j] =
                        (-a[l][i][j] + 8 * b[l][i][j] - 8 * c[l][i][j] + e[l][i][j]) / (12 * hh);
        return out;
    }

    // Ric_{bj} = R^k_{bkj} with R^l_{kij} = d_i G^l_{jk} - d_j G^l_{ik}
    // + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}
    DMat ricci(const Point& p) const {
        auto G = gamma(p);
        const int d = static_cast<int>(G.size());
        std::vector<std::vector<DMat>> dG;
        for (int i = 0; i < d; ++i) dG.push_back(dgamma(p, i, 5e-4));
        DMat ric(d, DVec(d, 0.0));
        for (int b = 0; b < d; ++b)
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int k = 0; k < d; ++k) {
                    s += dG[k][k][j][b] - dG[j][k][k][b];
                    for (int m = 0; m < d; ++m) s += G[k][k][m] * G[m][j][b] - G[k][j][m] * G[m][k][b];
                }
                ric[b][j] = s;
            }
        return ric;
    }
};

} // namespace

TEST_CASE("round spheres match the constant-curvature closed form") {
    auto [c2, g2] = round_sphere(2, 1.0);
    Point p{{1.1, 2.0}};
    auto pg = geometry_at(g2, p, 3);
    CHECK(pg.scal.value() == Catch::Approx(2.0).epsilon(1e-10));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(pg.ric(i, j).value() == Catch::Approx(pg.g(i, j).value()).margin(1e-10));
    DVec u{1.0, 0.0}, v{0.0, 1.0};
    CHECK(sectional(pg, u, v) == Catch::Approx(1.0).epsilon(1e-10));

    auto [c3, g3] = round_sphere(3, 1.0);
    auto pg3 = geometry_at(g3, Point{{1.2, 1.4, 0.8}}, 3);
    CHECK(pg3.scal.value() == Catch::Approx(6.0).epsilon(1e-10));

    auto [cr, gr] = round_sphere(2, 2.0);
    auto pgr = geometry_at(gr, Point{{1.0, 1.0}}, 2);
    CHECK(pgr.scal.value() == Catch::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("flat charts have identically zero curvature") {
    auto [c, g] = flat_chart(4);
    Sampler samp;
    samp.count = 10;
    for (const auto& pt : samp.draw(*c)) {
        auto pg = geometry_at(g, pt, 2);
        CHECK(std::abs(pg.scal.value()) < 1e-12);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(std::abs(pg.ric(i, j).value()) < 1e-12);
    }
}

TEST_CASE("jet Ricci agrees with the nested finite-difference oracle on random analytic metrics") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    for (int trial = 0; trial < 3; ++trial) {
        double a = U(rng), b = U(rng), c = U(rng);
        std::vector<std::string> nm{"x1", "x2", "x3"};
        auto chart = std::make_shared<Chart>(nm,
                                             std::vector<std::pair<double, double>>{{-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}},
                                             std::vector<bool>{false, false, false});
        MetricField g{chart, [a, b, c](std::span<const Jet> co) {
                          const JetSpace& sp = co[0].space();
                          JetMat m = JetMat::identity(sp, 3);
                          m(0, 0) += sin(co[1]) * a;
                          m(1, 1) += exp(co[2] * b) - 1.0;
                          m(2, 2) += co[0] * co[0] * c;
                          m(0, 1) = m(1, 0) = sin(co[0] * 2.0) * (0.2 * a);
                          m(1, 2) = m(2, 1) = co[0] * co[1] * (0.2 * b);
                          return m;
                      }};
        FdOracle oracle{g, 1e-4};
        Sampler samp;
        samp.seed = 100 + trial;
        samp.count = 4;
        samp.shrink = 0.3;
        for (const auto& pt : samp.draw(*chart)) {
            auto pg = geometry_at(g, pt, 2);
            DMat fd = oracle.ricci(pt);
            double scale = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(fd[i][j]));
            scale = std::max(scale, 1.0);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    CHECK(std::abs(pg.ric(i, j).value() - fd[i][j]) / scale < 1e-5);
        }
    }
}

TEST_CASE("curvature symmetries and Bianchi identity hold at random points") {
    auto [c, g] = round_sphere(3, 1.3);
    auto pg = geometry_at(g, Point{{1.0, 1.3, 2.0}}, 3);
    const int d = 3;
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    // antisymmetry in the last pair
                    CHECK(std::abs(pg.riem(l, k, i, j).value() + pg.riem(l, k, j, i).value()) < 1e-10);
                    // first Bianchi: R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0
                    CHECK(std::abs(pg.riem(l, k, i, j).value() + pg.riem(l, i, j, k).value() +
                                   pg.riem(l, j, k, i).value()) < 1e-9);
                }
}

TEST_CASE("sectional curvature is frame invariant") {
    auto [c, g] = round_sphere(2, 1.0);
    auto pg = geometry_at(g, Point{{1.2, 2.2}}, 2);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int t = 0; t < 10; ++t) {
        DVec u{U(rng), U(rng)}, v{U(rng), U(rng)};
        if (std::abs(u[0] * v[1] - u[1] * v[0]) < 0.1) continue;
        CHECK(sectional(pg, u, v) == Catch::Approx(1.0).epsilon(1e-9));
    }
    DVec u{1.0, 0.0};
    DVec v{1.0, 1e-9};
    CHECK_THROWS_AS(sectional(pg, u, v), DegeneratePlaneError);
}

TEST_CASE("d composed with d vanishes") {
    std::vector<std::string> nm{"x1", "x2", "x3"};
    auto chart = std::make_shared<Chart>(nm,
                                         std::vector<std::pair<double, double>>{{-1, 1}, {-1, 1}, {-1, 1}},
                                         std::vector<bool>{false, false, false});
    auto coords = chart->seed(Point{{0.2, -0.3, 0.5}}, 3);
    JetVec w(3, Jet(coords[0].space(), 0.0));
    w[0] = sin(coords[1]) * coords[2];
    w[1] = coords[0] * coords[0];
    w[2] = exp(coords[1] * 0.5);
    Jet3 ddw = ext_deriv_twoform(ext_deriv_oneform(w));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) CHECK(std::abs(ddw(i, j, k).value()) < 1e-13);
}

TEST_CASE("Laplacian sign convention: positive spectrum on the flat torus") {
    // f = sin(x) on the periodic line: Delta f = +f under the chosen sign.
    std::vector<std::string> nm{"x1"};
    auto chart = std::make_shared<Chart>(nm, std::vector<std::pair<double, double>>{{0.0, 6.283185307179586}},
                                         std::vector<bool>{true});
    MetricField g{chart, [](std::span<const Jet> c) { return JetMat::identity(c[0].space(), 1); }};
    auto pg = geometry_at(g, Point{{1.1}}, 3);
    Jet f = sin(pg.coords[0]);
    CHECK(laplacian_scalar(pg, f).value() == Catch::Approx(std::sin(1.1)).epsilon(1e-12));
}

TEST_CASE("degenerate metric is rejected") {
    std::vector<std::string> nm{"x1", "x2"};
    auto chart = std::make_shared<Chart>(nm, std::vector<std::pair<double, double>>{{-1, 1}, {-1, 1}},
                                         std::vector<bool>{false, false});
    MetricField g{chart, [](std::span<const Jet> c) {
                      JetMat m = JetMat::zero(c[0].space(), 2, 2);
                      m(0, 0) = Jet(c[0].space(), 1.0);
                      return m; // rank 1
                  }};
    CHECK_THROWS_AS(geometry_at(g, Point{{0.0, 0.0}}, 2), DegenerateMetricError);
}

TEST_CASE("sampler is deterministic and respects the box") {
    auto [c, g] = flat_chart(2);
    Sampler s1;
    s1.seed = 7;
    s1.count = 30;
    Sampler s2 = s1;
    auto a = s1.draw(*c), b = s2.draw(*c);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (int k = 0; k < 2; ++k) {
            CHECK(a[i].x[k] == b[i].x[k]);
            CHECK(a[i].x[k] > -1.0);
            CHECK(a[i].x[k] < 1.0);
        }
}
