#pragma once
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gman/errors.hpp"

namespace gman {

// Small dense double-valued helpers for pointwise frame and spectral work.
// Everything here operates on chart-dimension-sized matrices.

using DVec = std::vector<double>;
using DMat = std::vector<std::vector<double>>; // row-major [i][j]

inline double dot_g(const DMat& g, const DVec& u, const DVec& v) {
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j) s += g[i][j] * u[i] * v[j];
    return s;
}

// Gram-Schmidt against the metric g. Seeds come first (vertical fields of
// a structure, when present), then the coordinate frame; near-dependent
// candidates are dropped, so the result is a full g-orthonormal frame.
inline std::vector<DVec> orthonormal_frame(const DMat& g, const std::vector<DVec>& seeds) {
    const int d = static_cast<int>(g.size());
    std::vector<DVec> cand = seeds;
    for (int i = 0; i < d; ++i) {
        DVec e(d, 0.0);
        e[i] = 1.0;
        cand.push_back(e);
    }
    std::vector<DVec> frame;
    for (auto& v : cand) {
        DVec w = v;
        for (auto& e : frame) {
            double c = dot_g(g, w, e);
            for (int i = 0; i < d; ++i) w[i] -= c * e[i];
        }
        double nn = dot_g(g, w, w);
        if (nn < 1e-18) continue;
        double inv = 1.0 / std::sqrt(nn);
        for (auto& x : w) x *= inv;
        frame.push_back(w);
        if (static_cast<int>(frame.size()) == d) break;
    }
    if (static_cast<int>(frame.size()) != d)
        throw DegenerateMetricError("orthonormal_frame: could not complete frame");
    return frame;
}

// Random g-orthonormal frame (for frame-invariance property tests).
inline std::vector<DVec> random_orthonormal_frame(const DMat& g, std::mt19937_64& rng) {
    const int d = static_cast<int>(g.size());
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::vector<DVec> seeds(d, DVec(d, 0.0));
    for (auto& s : seeds)
        for (auto& x : s) x = nrm(rng);
    return orthonormal_frame(g, seeds);
}

// Cyclic Jacobi eigensolver for symmetric matrices; returns eigenvalues
// ascending. Plenty for chart-sized inputs.
inline DVec symmetric_eigenvalues(DMat a) {
    const int n = static_cast<int>(a.size());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    DVec ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Singular values (descending) via the spectrum of A^T A.
inline DVec singular_values(const DMat& a) {
    const int n = static_cast<int>(a.size());
    DMat ata(n, DVec(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) ata[i][j] += a[k][i] * a[k][j];
    DVec ev = symmetric_eigenvalues(ata);
    DVec sv(n);
    for (int i = 0; i < n; ++i) sv[i] = std::sqrt(std::max(0.0, ev[n - 1 - i]));
    return sv;
}

inline double min_eigenvalue(const DMat& a) { return symmetric_eigenvalues(a).front(); }

// Solve a small SPD-ish linear system by Gaussian elimination with
// partial pivoting (normal equations in the soliton fitter).
inline DVec solve_linear(DMat a, DVec b) {
    const int n = static_cast<int>(a.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) throw Error("solve_linear: singular system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (int j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    DVec x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

} // namespace gman
