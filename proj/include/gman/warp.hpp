#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "gman/s_structure.hpp"

namespace gman {

// The vertical/horizontal splitting used for warping: a leafwise frame
// and its dual one-forms. For an almost S-structure these are xi_i, eta^i.
struct VerticalSplitting {
    std::shared_ptr<const Chart> chart;
    std::vector<VectorField> frame;
    std::vector<OneFormField> duals;

    int rank() const { return static_cast<int>(frame.size()); }
};

inline VerticalSplitting splitting_of(const AlmostSStructure& S) {
    return VerticalSplitting{S.chart, S.xi, S.eta};
}

// max over samples and frame fields of |xi_i f|: zero iff f is basic
// (constant along leaves).
inline double basic_defect(const ScalarField& f, const VerticalSplitting& split, const Sampler& sampler) {
    double m = 0.0;
    for (const auto& pt : sampler.draw(*split.chart)) {
        auto coords = split.chart->seed(split.chart->wrap(pt), 1);
        Jet fj = f.fn(coords);
        for (const auto& xi : split.frame) {
            JetVec x = xi.fn(coords);
            double s = 0.0;
            for (size_t k = 0; k < x.size(); ++k) s += x[k].value() * fj.d(static_cast<int>(k));
            m = std::max(m, std::abs(s));
        }
    }
    return m;
}

inline double basic_defect(const ScalarField& f, const AlmostSStructure& S, const Sampler& sampler) {
    return basic_defect(f, splitting_of(S), sampler);
}

// g_w(X,Y) = e^{2w} g(PvX, PvY) + g(PhX, PhY) for a basic w: vertical
// block scaled, horizontal unchanged, cross block identically zero. The
// warped metric is itself a jet-exact field, so the whole curvature stack
// applies to it unchanged.
inline MetricField vertical_warp(const MetricField& g, const VerticalSplitting& split, const ScalarField& w,
                                 const Sampler& sampler, double basic_tol = 1e-8) {
    double defect = basic_defect(w, split, sampler);
    if (defect >= basic_tol)
        throw Error("vertical_warp: warp function is not basic (defect " + std::to_string(defect) + ")");
    auto frame = split.frame;
    auto duals = split.duals;
    auto gfn = g.fn;
    auto wfn = w.fn;
    const int p = split.rank();
    return MetricField{g.chart, [gfn, wfn, frame, duals, p](std::span<const Jet> c) {
                           const JetSpace& sp = c[0].space();
                           const int d = static_cast<int>(c.size());
                           JetMat gm = gfn(c);
                           JetMat pv = JetMat::zero(sp, d, d);
                           for (int i = 0; i < p; ++i) {
                               JetVec x = frame[i].fn(c);
                               JetVec e = duals[i].fn(c);
                               for (int a = 0; a < d; ++a)
                                   for (int b = 0; b < d; ++b) pv(a, b) += x[a] * e[b];
                           }
                           JetMat ph = JetMat::identity(sp, d) - pv;
                           Jet scale = exp(wfn(c) * 2.0);
                           JetMat out = JetMat::zero(sp, d, d);
                           for (int i = 0; i < d; ++i)
                               for (int j = 0; j < d; ++j) {
                                   Jet vert(sp, 0.0), horiz(sp, 0.0);
                                   for (int a = 0; a < d; ++a)
                                       for (int b = 0; b < d; ++b) {
                                           vert += gm(a, b) * pv(a, i) * pv(b, j);
                                           horiz += gm(a, b) * ph(a, i) * ph(b, j);
                                       }
                                   out(i, j) = scale * vert + horiz;
                               }
                           return out;
                       }};
}

// Canonical variation g_t: vertical block scaled by t^2, i.e. the warp
// with constant w = ln t.
inline MetricField canonical_variation(const MetricField& g, const VerticalSplitting& split, double t,
                                       const Sampler& sampler) {
    if (!(t > 0)) throw Error("canonical_variation: t must be positive");
    double lnt = std::log(t);
    ScalarField w{g.chart, [lnt](std::span<const Jet> c) { return Jet(c[0].space(), lnt); }};
    return vertical_warp(g, split, w, sampler);
}

// Leafwise curvature of the characteristic foliation: sectional curvature
// on vertical 2-planes, leafwise Ricci of vertical directions (ambient
// curvature restricted -- valid once the second fundamental form is
// verified to vanish), and the II norm itself.
struct LeafCurvatureReport {
    double max_K = 0.0;        // over vertical planes and samples
    double max_ric_leaf = 0.0; // |Ric_F(xi_i, xi_i)|
    double max_II = 0.0;       // second fundamental form norm
    int plane_count = 0;
    bool leaf_values_trusted = true;
};

inline LeafCurvatureReport leaf_curvature_report(const AlmostSStructure& S, const Sampler& sampler,
                                                 double ii_tol = 1e-8) {
    LeafCurvatureReport rep;
    const int p = S.p;
    for (const auto& pt : sampler.draw(*S.chart)) {
        auto sap = structure_at(S, pt, 3);
        const int d = sap.dim();
        DMat gv = values(sap.geo.g);
        std::vector<DVec> xiv;
        for (int i = 0; i < p; ++i) xiv.push_back(values(sap.xi[i]));

        // II(xi_i, xi_j) = horizontal part of nabla_{xi_i} xi_j
        DMat phv = values(sap.proj_horiz);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                JetMat nx = cov_deriv_vector(sap.geo, sap.xi[j]);
                DVec nij(d, 0.0), II(d, 0.0);
                for (int k = 0; k < d; ++k)
                    for (int a = 0; a < d; ++a) nij[k] += nx(k, a).value() * xiv[i][a];
                for (int k = 0; k < d; ++k)
                    for (int m = 0; m < d; ++m) II[k] += phv[k][m] * nij[m];
                rep.max_II = std::max(rep.max_II, vector_norm(gv, II));
            }

        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                rep.max_K = std::max(rep.max_K, std::abs(sectional(sap.geo, xiv[i], xiv[j])));
                if (rep.plane_count == 0) rep.plane_count = p * (p - 1) / 2;
            }
            // Ric_F(xi_i, xi_i) = sum_j <R(xi_j, xi_i) xi_i, xi_j>
            double ric_f = 0.0;
            for (int j = 0; j < p; ++j)
                if (j != i) ric_f += riem_inner(sap.geo, xiv[j], xiv[i], xiv[i], xiv[j]);
            rep.max_ric_leaf = std::max(rep.max_ric_leaf, std::abs(ric_f));
        }
    }
    rep.leaf_values_trusted = rep.max_II < ii_tol;
    return rep;
}

// Extremal Ricci eigenvalues against g over the sample set:
// min/max of Ric(u,u)/|u|^2.
inline std::pair<double, double> ricci_range(const MetricField& g, const Sampler& sampler) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& pt : sampler.draw(*g.chart)) {
        auto pg = geometry_at(g, pt, 2);
        const int d = pg.dim();
        DMat gv = values(pg.g);
        auto frame = orthonormal_frame(gv, {});
        DMat ric_f(d, DVec(d, 0.0));
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        ric_f[a][b] += pg.ric(i, j).value() * frame[a][i] * frame[b][j];
        DVec ev = symmetric_eigenvalues(ric_f);
        lo = std::min(lo, ev.front());
        hi = std::max(hi, ev.back());
    }
    return {lo, hi};
}

} // namespace gman
