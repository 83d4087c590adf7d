#pragma once
#include <string>
#include <vector>

#include "gman/s_structure.hpp"

namespace gman {

// Built-in model spaces. The standard structure below is the classical
// example on R^{2n+p}: coordinates (x^1..x^n, y^1..y^n, z^1..z^p),
//   eta^a = (dz^a - sum_i y^i dx^i) / 2,   xi_a = 2 d/dz^a,
//   g = sum_a eta^a (x) eta^a + (sum_i dx^i dx^i + dy^i dy^i) / 4,
//   phi: d/dx_i -> -d/dy_i,  d/dy_i -> d/dx_i + y^i sum_a d/dz^a,  d/dz^a -> 0.
// The 1/2 on eta and the factor 2 on xi are the calibration making
// d eta^a (X,Y) = g(X, phi Y) hold exactly under this library's exterior
// derivative factor 1/(degree+1).
inline AlmostSStructure standard_s_structure(int n, int p, bool periodic = false) {
    if (n < 1 || p < 1) throw DimensionError("standard_s_structure: need n >= 1, p >= 1");
    const int d = 2 * n + p;
    std::vector<std::string> names;
    std::vector<std::pair<double, double>> box;
    std::vector<bool> mask;
    for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= n; ++i) names.push_back("y" + std::to_string(i));
    for (int a = 1; a <= p; ++a) names.push_back("z" + std::to_string(a));
    for (int i = 0; i < d; ++i) {
        box.emplace_back(-1.0, 1.0);
        mask.push_back(periodic);
    }
    auto chart = std::make_shared<Chart>(names, box, mask);
    // index helpers: x_i -> i, y_i -> n+i, z_a -> 2n+a
    MetricField g{chart, [n, p, d](std::span<const Jet> c) {
                      const JetSpace& sp = c[0].space();
                      JetMat m = JetMat::zero(sp, d, d);
                      for (int i = 0; i < n; ++i) {
                          for (int j = 0; j < n; ++j) {
                              m(i, j) = c[n + i] * c[n + j] * (p / 4.0);
                              if (i == j) m(i, j) += 0.25;
                          }
                          m(n + i, n + i) = Jet(sp, 0.25);
                          for (int a = 0; a < p; ++a) {
                              m(i, 2 * n + a) = c[n + i] * (-0.25);
                              m(2 * n + a, i) = m(i, 2 * n + a);
                          }
                      }
                      for (int a = 0; a < p; ++a) m(2 * n + a, 2 * n + a) = Jet(sp, 0.25);
                      return m;
                  }};
    EndoField phi{chart, [n, p, d](std::span<const Jet> c) {
                      const JetSpace& sp = c[0].space();
                      JetMat m = JetMat::zero(sp, d, d);
                      for (int i = 0; i < n; ++i) {
                          m(n + i, i) = Jet(sp, -1.0); // phi(d/dx_i) = -d/dy_i
                          m(i, n + i) = Jet(sp, 1.0);  // phi(d/dy_i) = d/dx_i + y^i sum_a d/dz^a
                          for (int a = 0; a < p; ++a) m(2 * n + a, n + i) = c[n + i];
                      }
                      return m;
                  }};
    std::vector<VectorField> xi;
    std::vector<OneFormField> eta;
    for (int a = 0; a < p; ++a) {
        xi.push_back(VectorField{chart, [n, a, d](std::span<const Jet> c) {
                                     JetVec v(d, Jet(c[0].space(), 0.0));
                                     v[2 * n + a] = Jet(c[0].space(), 2.0);
                                     return v;
                                 }});
        eta.push_back(OneFormField{chart, [n, a, d](std::span<const Jet> c) {
                                       const JetSpace& sp = c[0].space();
                                       JetVec w(d, Jet(sp, 0.0));
                                       for (int i = 0; i < n; ++i) w[i] = c[n + i] * (-0.5);
                                       w[2 * n + a] = Jet(sp, 0.5);
                                       return w;
                                   }});
    }
    std::string name = "standard-s(n=" + std::to_string(n) + ",p=" + std::to_string(p) + ")" +
                       (periodic ? " periodic" : "");
    return build_structure(chart, g, phi, xi, eta, n, p, name);
}

// The n = 0 degenerate case: a flat p-torus with phi = 0, xi_i = d/dz_i,
// eta^i = dz^i. Every axiom degenerates to 0 = 0.
inline AlmostSStructure flat_torus_degenerate(int p) {
    if (p < 1) throw DimensionError("flat_torus_degenerate: need p >= 1");
    std::vector<std::string> names;
    std::vector<std::pair<double, double>> box;
    std::vector<bool> mask;
    for (int a = 1; a <= p; ++a) {
        names.push_back("z" + std::to_string(a));
        box.emplace_back(0.0, 2 * 3.14159265358979323846);
        mask.push_back(true);
    }
    auto chart = std::make_shared<Chart>(names, box, mask);
    MetricField g{chart, [p](std::span<const Jet> c) { return JetMat::identity(c[0].space(), p); }};
    EndoField phi{chart, [p](std::span<const Jet> c) { return JetMat::zero(c[0].space(), p, p); }};
    std::vector<VectorField> xi;
    std::vector<OneFormField> eta;
    for (int a = 0; a < p; ++a) {
        xi.push_back(VectorField{chart, [a, p](std::span<const Jet> c) {
                                     JetVec v(p, Jet(c[0].space(), 0.0));
                                     v[a] = Jet(c[0].space(), 1.0);
                                     return v;
                                 }});
        eta.push_back(OneFormField{chart, [a, p](std::span<const Jet> c) {
                                       JetVec w(p, Jet(c[0].space(), 0.0));
                                       w[a] = Jet(c[0].space(), 1.0);
                                       return w;
                                   }});
    }
    return build_structure(chart, g, phi, xi, eta, 0, p, "flat-torus(p=" + std::to_string(p) + ")");
}

// Round m-sphere of radius r on a polar chart avoiding the poles.
// Constant curvature 1/r^2: Ric = (m-1)/r^2 g, s = m(m-1)/r^2.
inline std::pair<std::shared_ptr<const Chart>, MetricField> round_sphere(int m, double r) {
    if (m != 2 && m != 3) throw DimensionError("round_sphere: m must be 2 or 3");
    if (!(r > 0)) throw DimensionError("round_sphere: radius must be positive");
    const double pi = 3.14159265358979323846;
    std::shared_ptr<const Chart> chart;
    if (m == 2)
        chart = std::make_shared<Chart>(std::vector<std::string>{"theta", "phi"},
                                        std::vector<std::pair<double, double>>{{0.4, pi - 0.4}, {0.2, 2 * pi - 0.2}},
                                        std::vector<bool>{false, false});
    else
        chart = std::make_shared<Chart>(
            std::vector<std::string>{"theta", "phi", "psi"},
            std::vector<std::pair<double, double>>{{0.4, pi - 0.4}, {0.4, pi - 0.4}, {0.2, 2 * pi - 0.2}},
            std::vector<bool>{false, false, false});
    MetricField g{chart, [m, r](std::span<const Jet> c) {
                      const JetSpace& sp = c[0].space();
                      JetMat gm = JetMat::zero(sp, m, m);
                      gm(0, 0) = Jet(sp, r * r);
                      Jet s0 = sin(c[0]);
                      gm(1, 1) = s0 * s0 * (r * r);
                      if (m == 3) {
                          Jet s1 = sin(c[1]);
                          gm(2, 2) = s0 * s0 * s1 * s1 * (r * r);
                      }
                      return gm;
                  }};
    return {chart, g};
}

// Flat R^m on a box chart with the identity metric.
inline std::pair<std::shared_ptr<const Chart>, MetricField> flat_chart(int m) {
    if (m < 1) throw DimensionError("flat_chart: need m >= 1");
    std::vector<std::string> names;
    std::vector<std::pair<double, double>> box;
    std::vector<bool> mask;
    for (int i = 1; i <= m; ++i) {
        names.push_back("x" + std::to_string(i));
        box.emplace_back(-1.0, 1.0);
        mask.push_back(false);
    }
    auto chart = std::make_shared<Chart>(names, box, mask);
    MetricField g{chart, [m](std::span<const Jet> c) { return JetMat::identity(c[0].space(), m); }};
    return {chart, g};
}

struct CatalogEntry {
    std::string name;
    std::string parameters;
    std::string expected;
};

inline std::vector<CatalogEntry> catalog_entries() {
    return {
        {"standard-s", "--n N --p P [--periodic]",
         "passes all structure axioms and identities; normal; leaves totally geodesic and flat; Ric(xi_i,xi_j) = 2n"},
        {"flat-torus", "--p P", "n = 0 degenerate structure: phi = 0, flat, every axiom holds trivially"},
        {"sphere", "--m {2|3} --radius R", "constant curvature 1/R^2: Ric = (m-1)/R^2 g, s = m(m-1)/R^2"},
        {"flat", "--m M", "identity metric, all curvature zero"},
    };
}

} // namespace gman
