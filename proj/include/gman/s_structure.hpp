#pragma once
#include <map>
#include <string>
#include <vector>

#include "gman/geometry.hpp"

namespace gman {

// The structure tuple (chart, g, phi, xi_1..xi_p, eta^1..eta^p, n, p) with
// chart.dim = 2n + p. Construction checks dimensions only; whether the
// axioms actually hold is reported, never assumed (eta is stored
// independently of g and xi so a violated axiom stays visible).
struct AlmostSStructure {
    std::shared_ptr<const Chart> chart;
    MetricField g;
    EndoField phi;
    std::vector<VectorField> xi;
    std::vector<OneFormField> eta;
    int n = 0, p = 0;
    std::string name;
};

inline AlmostSStructure build_structure(std::shared_ptr<const Chart> chart, MetricField g, EndoField phi,
                                        std::vector<VectorField> xi, std::vector<OneFormField> eta,
                                        int n, int p, std::string name = "custom") {
    if (n < 0 || p < 1) throw DimensionError("build_structure: need n >= 0, p >= 1");
    if (chart->dim() != 2 * n + p) throw DimensionError("build_structure: chart.dim != 2n+p");
    if (static_cast<int>(xi.size()) != p) throw DimensionError("build_structure: xi list length != p");
    if (static_cast<int>(eta.size()) != p) throw DimensionError("build_structure: eta list length != p");
    return AlmostSStructure{std::move(chart), std::move(g), std::move(phi), std::move(xi), std::move(eta), n, p,
                            std::move(name)};
}

// All structure tensors evaluated at one point, as jets sharing the same
// coordinate seeds as the curvature stack.
struct StructureAtPoint {
    const AlmostSStructure* S;
    PointGeometry geo;
    JetMat phi;
    std::vector<JetVec> xi;  // xi[i][k] components
    std::vector<JetVec> eta; // eta[i][j] components
    JetMat sasaki;           // F_ij = g_ik phi^k_j
    std::vector<JetMat> h;   // h_i = 1/2 L_{xi_i} phi
    JetVec xibar;
    JetVec etabar;
    JetMat proj_vert, proj_horiz; // P~ = sum xi_i (x) eta^i, P = I - P~

    int dim() const { return geo.dim(); }
};

inline StructureAtPoint structure_at(const AlmostSStructure& S, const Point& p, int order = 3) {
    StructureAtPoint sap;
    sap.S = &S;
    sap.geo = geometry_at(S.g, p, order);
    const auto& coords = sap.geo.coords;
    const JetSpace& sp = sap.geo.space();
    const int d = sap.geo.dim();
    sap.phi = S.phi.fn(coords);
    for (const auto& x : S.xi) sap.xi.push_back(x.fn(coords));
    for (const auto& e : S.eta) sap.eta.push_back(e.fn(coords));
    sap.sasaki = JetMat::zero(sp, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) sap.sasaki(i, j) += sap.geo.g(i, k) * sap.phi(k, j);
    for (int i = 0; i < S.p; ++i) {
        JetMat L = lie_derivative_endo(sap.xi[i], sap.phi);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) L(a, b) *= 0.5;
        sap.h.push_back(L);
    }
    sap.xibar = JetVec(d, Jet(sp, 0.0));
    sap.etabar = JetVec(d, Jet(sp, 0.0));
    for (int i = 0; i < S.p; ++i)
        for (int k = 0; k < d; ++k) {
            sap.xibar[k] += sap.xi[i][k];
            sap.etabar[k] += sap.eta[i][k];
        }
    sap.proj_vert = JetMat::zero(sp, d, d);
    for (int i = 0; i < S.p; ++i)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) sap.proj_vert(a, b) += sap.xi[i][a] * sap.eta[i][b];
    sap.proj_horiz = JetMat::identity(sp, d) - sap.proj_vert;
    return sap;
}

namespace detail {
inline double max_abs(const JetMat& m) {
    double r = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j).value()));
    return r;
}
inline double max_abs(const JetVec& v) {
    double r = 0.0;
    for (const auto& x : v) r = std::max(r, std::abs(x.value()));
    return r;
}
} // namespace detail

// Named residuals of every structure axiom and its immediate consequences
// at one point. Residuals are reported, never thrown.
inline std::map<std::string, double> axiom_residuals(const StructureAtPoint& sap) {
    const int d = sap.dim();
    const int p = sap.S->p, n = sap.S->n;
    const JetSpace& sp = sap.geo.space();
    std::map<std::string, double> r;

    double unit = 0.0, dual = 0.0;
    for (int i = 0; i < p; ++i) {
        double nn = 0.0;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) nn += sap.geo.g(a, b).value() * sap.xi[i][a].value() * sap.xi[i][b].value();
        unit = std::max(unit, std::abs(std::sqrt(std::max(0.0, nn)) - 1.0));
        for (int j = 0; j < d; ++j) {
            double gx = 0.0;
            for (int k = 0; k < d; ++k) gx += sap.geo.g(j, k).value() * sap.xi[i][k].value();
            dual = std::max(dual, std::abs(sap.eta[i][j].value() - gx));
        }
    }
    r["axiom.xi_unit"] = unit;
    r["axiom.eta_dual"] = dual;

    JetMat phi2 = sap.phi * sap.phi;
    double ps = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double want = (a == b ? -1.0 : 0.0);
            for (int i = 0; i < p; ++i) want += sap.xi[i][a].value() * sap.eta[i][b].value();
            ps = std::max(ps, std::abs(phi2(a, b).value() - want));
        }
    r["axiom.phi_squared"] = ps;

    double deta = 0.0;
    for (int i = 0; i < p; ++i) {
        JetMat de = ext_deriv_oneform(sap.eta[i]);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                deta = std::max(deta, std::abs(de(a, b).value() - sap.sasaki(a, b).value()));
    }
    r["axiom.d_eta"] = deta;

    double pxi = 0.0, etaphi = 0.0;
    for (int i = 0; i < p; ++i) {
        pxi = std::max(pxi, detail::max_abs(matvec(sap.phi, sap.xi[i])));
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += sap.eta[i][k].value() * sap.phi(k, j).value();
            etaphi = std::max(etaphi, std::abs(s));
        }
    }
    r["axiom.phi_xi"] = pxi;
    r["axiom.eta_phi"] = etaphi;

    // rank(phi) = 2n, checked spectrally in a g-orthonormal frame: the p
    // smallest singular values must vanish.
    {
        DMat gv = values(sap.geo.g);
        std::vector<DVec> seeds;
        for (int i = 0; i < p; ++i) seeds.push_back(values(sap.xi[i]));
        auto frame = orthonormal_frame(gv, seeds);
        DMat A(d, DVec(d, 0.0));
        DMat phiv = values(sap.phi);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                // <phi E_b, E_a>_g
                DVec pe(d, 0.0);
                for (int k = 0; k < d; ++k)
                    for (int m = 0; m < d; ++m) pe[k] += phiv[k][m] * frame[b][m];
                A[a][b] = dot_g(gv, pe, frame[a]);
            }
        DVec sv = singular_values(A);
        double null_part = 0.0;
        for (int k = 2 * n; k < d; ++k) null_part = std::max(null_part, sv[k]);
        r["axiom.rank_phi_null"] = null_part;
        r["axiom.rank_phi_range_min"] = (n > 0 ? sv[2 * n - 1] : 0.0); // informational, large when healthy
    }

    double skew = 0.0, compat = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double sab = 0.0, sba = 0.0;
            for (int k = 0; k < d; ++k) {
                sab += sap.geo.g(a, k).value() * sap.phi(k, b).value();
                sba += sap.geo.g(b, k).value() * sap.phi(k, a).value();
            }
            skew = std::max(skew, std::abs(sab + sba));
            double gpp = 0.0;
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    gpp += sap.geo.g(k, l).value() * sap.phi(k, a).value() * sap.phi(l, b).value();
            double rhs = sap.geo.g(a, b).value();
            for (int i = 0; i < p; ++i) rhs -= sap.eta[i][a].value() * sap.eta[i][b].value();
            compat = std::max(compat, std::abs(gpp - rhs));
        }
    r["axiom.skew"] = skew;
    r["axiom.compatibility"] = compat;

    JetMat phi3 = phi2 * sap.phi;
    double pc = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) pc = std::max(pc, std::abs(phi3(a, b).value() + sap.phi(a, b).value()));
    r["axiom.phi_cubed"] = pc;

    double comm = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) comm = std::max(comm, detail::max_abs(commutator(sap.xi[i], sap.xi[j])));
    r["axiom.xi_commutators"] = comm;

    (void)sp;
    return r;
}

inline std::map<std::string, double> axiom_residuals(const AlmostSStructure& S, const Point& pt) {
    return axiom_residuals(structure_at(S, pt, 2));
}

// Sasaki form components and the closedness defect max |dF| at a point.
struct SasakiFormResult {
    DMat F;
    double max_dF;
};

inline SasakiFormResult sasaki_form(const StructureAtPoint& sap) {
    SasakiFormResult res;
    res.F = values(sap.sasaki);
    Jet3 dF = ext_deriv_twoform(sap.sasaki);
    double m = 0.0;
    const int d = sap.dim();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) m = std::max(m, std::abs(dF(i, j, k).value()));
    res.max_dF = m;
    return res;
}

// Nijenhuis torsion N_phi(X,Y) for vector fields given as jets.
inline JetVec nijenhuis(const StructureAtPoint& sap, const JetVec& X, const JetVec& Y) {
    JetVec phiX = matvec(sap.phi, X), phiY = matvec(sap.phi, Y);
    JetVec t = matvec(sap.phi * sap.phi, commutator(X, Y));
    JetVec b1 = commutator(phiX, phiY);
    JetVec b2 = matvec(sap.phi, commutator(phiX, Y));
    JetVec b3 = matvec(sap.phi, commutator(X, phiY));
    for (size_t k = 0; k < t.size(); ++k) t[k] = t[k] + b1[k] - b2[k] - b3[k];
    return t;
}

// N_phi + 2 sum_i d eta^i (x) xi_i applied to (X,Y); zero iff normal.
inline JetVec normality_defect(const StructureAtPoint& sap, const JetVec& X, const JetVec& Y) {
    JetVec defect = nijenhuis(sap, X, Y);
    const int d = sap.dim();
    for (int i = 0; i < sap.S->p; ++i) {
        JetMat de = ext_deriv_oneform(sap.eta[i]);
        Jet w(sap.geo.space(), 0.0);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) w += de(a, b) * X[a] * Y[b];
        for (int k = 0; k < d; ++k) defect[k] += 2.0 * w * sap.xi[i][k];
    }
    return defect;
}

// Max normality defect over coordinate-field pairs at a point.
inline double normality_defect_max(const StructureAtPoint& sap) {
    const int d = sap.dim();
    const JetSpace& sp = sap.geo.space();
    double m = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            JetVec X(d, Jet(sp, 0.0)), Y(d, Jet(sp, 0.0));
            X[a] = Jet(sp, 1.0);
            Y[b] = Jet(sp, 1.0);
            m = std::max(m, detail::max_abs(normality_defect(sap, X, Y)));
        }
    return m;
}

inline JetMat h_operator(const StructureAtPoint& sap, int i) { return sap.h[i]; }

// Div xi_alpha and the mean curvature vector H of the distribution D,
// H = sum_alpha <H, xi_alpha> xi_alpha with <H, xi_alpha> = -Div xi_alpha.
struct MeanCurvatureResult {
    DVec div_xi;  // per alpha
    DVec H;       // vector components
    double H_norm;
};

inline MeanCurvatureResult mean_curvature_H(const StructureAtPoint& sap) {
    MeanCurvatureResult res;
    const int d = sap.dim();
    res.H.assign(d, 0.0);
    for (int a = 0; a < sap.S->p; ++a) {
        double div = div_vector(sap.geo, sap.xi[a]).value();
        res.div_xi.push_back(div);
        for (int k = 0; k < d; ++k) res.H[k] += -div * sap.xi[a][k].value();
    }
    res.H_norm = vector_norm(values(sap.geo.g), res.H);
    return res;
}

} // namespace gman
