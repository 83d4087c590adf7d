#include <catch2/catch_amalgamated.hpp>

#include "gman/catalog.hpp"
#include "gman/warp.hpp"

using namespace gman;

namespace {

double max_metric_diff(const MetricField& a, const MetricField& b, const Sampler& samp, int order = 0) {
    double m = 0.0;
    for (const auto& pt : samp.draw(*a.chart)) {
        JetMat ma = a.at(pt, order), mb = b.at(pt, order);
        for (int i = 0; i < ma.rows(); ++i)
            for (int j = 0; j < ma.cols(); ++j) m = std::max(m, std::abs(ma(i, j).value() - mb(i, j).value()));
    }
    return m;
}

} // namespace

TEST_CASE("zero warp is the identity on metrics") {
    auto S = standard_s_structure(1, 2);
    Sampler samp;
    samp.count = 15;
    ScalarField zero{S.chart, [](std::span<const Jet> c) { return Jet(c[0].space(), 0.0); }};
    auto gw = vertical_warp(S.g, splitting_of(S), zero, samp);
    CHECK(max_metric_diff(S.g, gw, samp) < 1e-12);
}

TEST_CASE("constant warp matches the directly constructed scaled metric") {
    auto S = standard_s_structure(1, 1);
    Sampler samp;
    samp.count = 10;
    const double c0 = 0.37;
    auto gw = vertical_warp(S.g, splitting_of(S), ScalarField{S.chart, [c0](std::span<const Jet> c) {
                                                                 return Jet(c[0].space(), c0);
                                                             }},
                            samp);
    // direct construction: scale the vertical block of the catalog metric,
    // i.e. replace eta (x) eta by e^{2c} eta (x) eta
    auto etafn = S.eta[0].fn;
    auto gfn = S.g.fn;
    MetricField direct{S.chart, [etafn, gfn, c0](std::span<const Jet> c) {
                           JetMat m = gfn(c);
                           JetVec e = etafn(c);
                           double s = std::exp(2.0 * c0) - 1.0;
                           for (int i = 0; i < m.rows(); ++i)
                               for (int j = 0; j < m.cols(); ++j) m(i, j) += e[i] * e[j] * s;
                           return m;
                       }};
    CHECK(max_metric_diff(gw, direct, samp) < 1e-12);
    // curvature of both agrees
    double worst = 0.0;
    for (const auto& pt : samp.draw(*S.chart)) {
        auto pa = geometry_at(gw, pt, 2);
        auto pb = geometry_at(direct, pt, 2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                worst = std::max(worst, std::abs(pa.ric(i, j).value() - pb.ric(i, j).value()));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("warps compose additively") {
    auto S = standard_s_structure(1, 1);
    Sampler samp;
    samp.count = 10;
    auto split = splitting_of(S);
    ScalarField w1{S.chart, [](std::span<const Jet> c) { return sin(c[0]) * 0.1; }};
    ScalarField w2{S.chart, [](std::span<const Jet> c) { return c[1] * 0.2; }};
    ScalarField w12{S.chart, [](std::span<const Jet> c) { return sin(c[0]) * 0.1 + c[1] * 0.2; }};
    auto g1 = vertical_warp(S.g, split, w1, samp);
    auto g12a = vertical_warp(g1, split, w2, samp);
    auto g12b = vertical_warp(S.g, split, w12, samp);
    CHECK(max_metric_diff(g12a, g12b, samp) < 1e-10);
}

TEST_CASE("warped metric stays block diagonal and satisfies metric invariants") {
    auto S = standard_s_structure(1, 1);
    Sampler samp;
    samp.count = 10;
    ScalarField w{S.chart, [](std::span<const Jet> c) { return sin(c[0]) * 0.1; }};
    auto gw = vertical_warp(S.g, splitting_of(S), w, samp);
    double cross = 0.0, ric_diff = 0.0;
    for (const auto& pt : samp.draw(*S.chart)) {
        auto sap = structure_at(S, pt, 2);
        JetMat m = gw.at(pt, 2);
        const int d = sap.dim();
        // g_w(P~ X, P X) = 0
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double s = 0.0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        s += m(i, j).value() * sap.proj_vert(i, a).value() * sap.proj_horiz(j, b).value();
                cross = std::max(cross, std::abs(s));
            }
        auto pw = geometry_at(gw, pt, 2);  // positive-definiteness enforced inside
        auto p0 = geometry_at(S.g, pt, 2);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                ric_diff = std::max(ric_diff, std::abs(pw.ric(i, j).value() - p0.ric(i, j).value()));
    }
    CHECK(cross < 1e-12);
    CHECK(ric_diff > 1e-3); // the warp actually changes the Ricci tensor
}

TEST_CASE("non-basic warp functions are rejected with the defect") {
    auto S = standard_s_structure(1, 1);
    Sampler samp;
    samp.count = 10;
    ScalarField bad{S.chart, [](std::span<const Jet> c) { return c[2]; }}; // depends on z
    try {
        vertical_warp(S.g, splitting_of(S), bad, samp);
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("defect") != std::string::npos);
    }
}

TEST_CASE("basic defect measures leafwise variation") {
    auto S = standard_s_structure(1, 1);
    Sampler samp;
    samp.count = 20;
    ScalarField fx{S.chart, [](std::span<const Jet> c) { return sin(c[0]) * c[1]; }};
    CHECK(basic_defect(fx, S, samp) < 1e-10);
    ScalarField fz{S.chart, [](std::span<const Jet> c) { return c[2]; }};
    CHECK(basic_defect(fz, S, samp) > 0.5); // xi = 2 d/dz, so xi(z) = 2
    ScalarField fc{S.chart, [](std::span<const Jet> c) { return Jet(c[0].space(), 4.2); }};
    CHECK(basic_defect(fc, S, samp) == 0.0);
}

TEST_CASE("canonical variation is the logarithmic warp") {
    auto S = standard_s_structure(1, 1);
    Sampler samp;
    samp.count = 8;
    auto split = splitting_of(S);
    auto g1 = canonical_variation(S.g, split, 1.0, samp);
    CHECK(max_metric_diff(S.g, g1, samp) < 1e-12);
    auto gh = canonical_variation(S.g, split, 0.5, samp);
    auto gw = vertical_warp(S.g, split, ScalarField{S.chart, [](std::span<const Jet> c) {
                                                       return Jet(c[0].space(), std::log(0.5));
                                                   }},
                            samp);
    CHECK(max_metric_diff(gh, gw, samp) < 1e-12);
    CHECK_THROWS_AS(canonical_variation(S.g, split, 0.0, samp), Error);
    CHECK_THROWS_AS(canonical_variation(S.g, split, -1.0, samp), Error);
}

TEST_CASE("leaf curvature report certifies flat totally geodesic leaves") {
    auto S = standard_s_structure(1, 2);
    Sampler samp;
    samp.count = 12;
    auto rep = leaf_curvature_report(S, samp);
    CHECK(rep.max_II < 1e-8);
    CHECK(rep.max_K < 1e-8);
    CHECK(rep.max_ric_leaf < 1e-8);
    CHECK(rep.leaf_values_trusted);
    CHECK(rep.plane_count == 1);

    auto rep1 = leaf_curvature_report(standard_s_structure(1, 1), samp);
    CHECK(rep1.plane_count == 0); // p = 1: no vertical planes, II only
    CHECK(rep1.max_II < 1e-8);

    auto rept = leaf_curvature_report(flat_torus_degenerate(2), samp);
    CHECK(rept.max_K == 0.0);
    CHECK(rept.max_II == 0.0);
}

TEST_CASE("ricci_range matches constant-curvature oracles") {
    Sampler samp;
    samp.count = 15;
    auto [fc, fg] = flat_chart(3);
    auto [flo, fhi] = ricci_range(fg, samp);
    CHECK(std::abs(flo) < 1e-10);
    CHECK(std::abs(fhi) < 1e-10);
    auto [s2c, s2g] = round_sphere(2, 1.0);
    auto [lo2, hi2] = ricci_range(s2g, samp);
    CHECK(lo2 == Catch::Approx(1.0).epsilon(1e-9));
    CHECK(hi2 == Catch::Approx(1.0).epsilon(1e-9));
    auto [s3c, s3g] = round_sphere(3, 1.0);
    auto [lo3, hi3] = ricci_range(s3g, samp);
    CHECK(lo3 == Catch::Approx(2.0).epsilon(1e-9));
    CHECK(hi3 == Catch::Approx(2.0).epsilon(1e-9));
}
