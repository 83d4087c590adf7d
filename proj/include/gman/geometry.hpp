#pragma once
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gman/field.hpp"
#include "gman/linalg.hpp"

namespace gman {

// Convention ledger. These are fixed once for the whole artifact and
// embedded in every report so a reader can reproduce signs.
//   curvature: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
//              Ric(X,Y) = tr(Z -> R(Z,X)Y), s = g-trace of Ric
//   exterior derivative: coordinate formula scaled by 1/(degree+1), so
//              d eta(X,Y) = (X eta(Y) - Y eta(X) - eta([X,Y])) / 2
//   divergence: (Div T)_j = (nabla_k T)^k_j, Div X = nabla_k X^k
//   laplacian: Delta f = -trace Hess f
struct Conventions {
    static double ext_deriv_factor(int degree) { return 1.0 / (degree + 1); }
    static const char* curvature() { return "R(X,Y)Z = [nabla_X,nabla_Y]Z - nabla_[X,Y]Z; Ric(X,Y) = tr(Z -> R(Z,X)Y)"; }
    static const char* exterior() { return "d on k-forms: antisymmetrized coordinate derivative / (k+1)"; }
    static const char* divergence() { return "(Div T)_j = (nabla_k T)^k_j; Div X = nabla_k X^k"; }
    static const char* laplacian() { return "Delta f = -tr Hess f"; }
};

// Gamma^k_{ij}, symmetric in (i,j).
class Jet3 {
public:
    Jet3() : d_(0) {}
    Jet3(const JetSpace& sp, int d) : d_(d), v_(size_t(d) * d * d, Jet(sp, 0.0)) {}
    Jet& operator()(int k, int i, int j) { return v_[(size_t(k) * d_ + i) * d_ + j]; }
    const Jet& operator()(int k, int i, int j) const { return v_[(size_t(k) * d_ + i) * d_ + j]; }
    int dim() const { return d_; }

private:
    int d_;
    std::vector<Jet> v_;
};

// Riem(l,k,i,j): component l of R(e_i, e_j) e_k.
class Jet4 {
public:
    Jet4() : d_(0) {}
    Jet4(const JetSpace& sp, int d) : d_(d), v_(size_t(d) * d * d * d, Jet(sp, 0.0)) {}
    Jet& operator()(int l, int k, int i, int j) { return v_[((size_t(l) * d_ + k) * d_ + i) * d_ + j]; }
    const Jet& operator()(int l, int k, int i, int j) const { return v_[((size_t(l) * d_ + k) * d_ + i) * d_ + j]; }
    int dim() const { return d_; }

private:
    int d_;
    std::vector<Jet> v_;
};

inline DMat values(const JetMat& m) {
    DMat r(m.rows(), DVec(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r[i][j] = m(i, j).value();
    return r;
}

inline DVec values(const JetVec& v) {
    DVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = v[i].value();
    return r;
}

// Everything the curvature stack knows about a metric at one point:
// coordinate jets, g, its inverse, Christoffel symbols, and (order >= 2)
// the full curvature tensor, Ricci and scalar curvature, all as jets so
// they can be differentiated further.
struct PointGeometry {
    Point pt;
    int order;
    JetVec coords;
    JetMat g, ginv;
    Jet3 gamma;
    bool has_curvature = false;
    Jet4 riem;
    JetMat ric;
    Jet scal;

    int dim() const { return static_cast<int>(coords.size()); }
    const JetSpace& space() const { return coords[0].space(); }
};

inline Jet3 christoffel_from_jets(const JetMat& g, const JetMat& ginv) {
    const int d = g.rows();
    const JetSpace& sp = g(0, 0).space();
    Jet3 gamma(sp, d);
    // dg[l][i][j] = partial_i g_{jl}
    std::vector<JetMat> dg(d, JetMat::zero(sp, d, d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l) dg[i](j, l) = g(j, l).deriv(i);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                Jet s(sp, 0.0);
                for (int l = 0; l < d; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                s *= 0.5;
                gamma(k, i, j) = s;
                gamma(k, j, i) = s;
            }
    return gamma;
}

// Build the geometry cache for a metric field at a point. order >= 2 (the
// default 3 keeps first derivatives of Ricci readable) enables curvature.
inline PointGeometry geometry_at(const MetricField& gf, const Point& p, int order = 3) {
    PointGeometry pg;
    pg.pt = gf.chart->wrap(p);
    pg.order = order;
    pg.coords = gf.chart->seed(pg.pt, order);
    pg.g = gf.fn(pg.coords);
    const int d = pg.dim();
    if (min_eigenvalue(values(pg.g)) <= 0.0)
        throw DegenerateMetricError("metric not positive definite at sampled point");
    pg.ginv = pg.g.inverse();
    pg.gamma = christoffel_from_jets(pg.g, pg.ginv);
    if (order >= 2) {
        const JetSpace& sp = pg.space();
        pg.riem = Jet4(sp, d);
        for (int l = 0; l < d; ++l)
            for (int k = 0; k < d; ++k)
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        Jet r = pg.gamma(l, j, k).deriv(i) - pg.gamma(l, i, k).deriv(j);
                        for (int m = 0; m < d; ++m)
                            r += pg.gamma(l, i, m) * pg.gamma(m, j, k) - pg.gamma(l, j, m) * pg.gamma(m, i, k);
                        pg.riem(l, k, i, j) = r;
                    }
        pg.ric = JetMat::zero(sp, d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Jet r(sp, 0.0);
                for (int k = 0; k < d; ++k) r += pg.riem(k, j, k, i);
                pg.ric(i, j) = r;
            }
        pg.scal = Jet(sp, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) pg.scal += pg.ginv(i, j) * pg.ric(i, j);
        pg.has_curvature = true;
    }
    return pg;
}

// K(u,v) = <R(u,v)v, u> / (|u|^2 |v|^2 - <u,v>^2) for doubles u, v.
inline double sectional(const PointGeometry& pg, const DVec& u, const DVec& v) {
    const int d = pg.dim();
    DMat gv = values(pg.g);
    double uu = dot_g(gv, u, u), vv = dot_g(gv, v, v), uv = dot_g(gv, u, v);
    double denom = uu * vv - uv * uv;
    if (denom < 1e-14) throw DegeneratePlaneError("sectional: u, v nearly dependent");
    double num = 0.0;
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int m = 0; m < d; ++m)
                        num += gv[l][m] * u[m] * pg.riem(l, k, i, j).value() * u[i] * v[j] * v[k];
    return num / denom;
}

// <R(u,v)w, z> with double vectors (leafwise Ricci and Bianchi checks).
inline double riem_inner(const PointGeometry& pg, const DVec& u, const DVec& v, const DVec& w, const DVec& z) {
    const int d = pg.dim();
    DMat gv = values(pg.g);
    double s = 0.0;
    for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int m = 0; m < d; ++m)
                        s += gv[l][m] * z[m] * pg.riem(l, k, i, j).value() * u[i] * v[j] * w[k];
    return s;
}

// Lie derivative of a metric along X: (L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k.
inline JetMat lie_derivative_metric(const JetVec& X, const JetMat& g) {
    const int d = g.rows();
    const JetSpace& sp = g(0, 0).space();
    JetMat r = JetMat::zero(sp, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Jet s(sp, 0.0);
            for (int k = 0; k < d; ++k)
                s += X[k] * g(i, j).deriv(k) + g(k, j) * X[k].deriv(i) + g(i, k) * X[k].deriv(j);
            r(i, j) = s;
        }
    return r;
}

// Lie derivative of an endomorphism: (L_X T)^i_j = X^k d_k T^i_j - T^k_j d_k X^i + T^i_k d_j X^k.
inline JetMat lie_derivative_endo(const JetVec& X, const JetMat& T) {
    const int d = T.rows();
    const JetSpace& sp = T(0, 0).space();
    JetMat r = JetMat::zero(sp, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Jet s(sp, 0.0);
            for (int k = 0; k < d; ++k)
                s += X[k] * T(i, j).deriv(k) - T(k, j) * X[i].deriv(k) + T(i, k) * X[k].deriv(j);
            r(i, j) = s;
        }
    return r;
}

// Full covariant derivative of a vector field: A(k,i) = (nabla_i V)^k.
inline JetMat cov_deriv_vector(const PointGeometry& pg, const JetVec& V) {
    const int d = pg.dim();
    JetMat a = JetMat::zero(pg.space(), d, d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i) {
            Jet s = V[k].deriv(i);
            for (int m = 0; m < d; ++m) s += pg.gamma(k, i, m) * V[m];
            a(k, i) = s;
        }
    return a;
}

// A(i,j) = (nabla_i w)_j.
inline JetMat cov_deriv_oneform(const PointGeometry& pg, const JetVec& w) {
    const int d = pg.dim();
    JetMat a = JetMat::zero(pg.space(), d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Jet s = w[j].deriv(i);
            for (int m = 0; m < d; ++m) s -= pg.gamma(m, i, j) * w[m];
            a(i, j) = s;
        }
    return a;
}

// (nabla_i T)^k_j.
inline Jet3 cov_deriv_endo(const PointGeometry& pg, const JetMat& T) {
    const int d = pg.dim();
    Jet3 a(pg.space(), d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            for (int j = 0; j < d; ++j) {
                Jet s = T(k, j).deriv(i);
                for (int m = 0; m < d; ++m)
                    s += pg.gamma(k, i, m) * T(m, j) - pg.gamma(m, i, j) * T(k, m);
                a(i, k, j) = s;
            }
    return a;
}

// Hess f (i,j) = d_i d_j f - Gamma^k_ij d_k f, as jets.
inline JetMat hessian_scalar(const PointGeometry& pg, const Jet& f) {
    const int d = pg.dim();
    JetMat h = JetMat::zero(pg.space(), d, d);
    JetVec df(d, Jet(pg.space(), 0.0));
    for (int i = 0; i < d; ++i) df[i] = f.deriv(i);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            Jet s = df[j].deriv(i);
            for (int k = 0; k < d; ++k) s -= pg.gamma(k, i, j) * df[k];
            h(i, j) = s;
            h(j, i) = s;
        }
    return h;
}

// Delta f = -g^{ij} Hess_ij (geometer's sign).
inline Jet laplacian_scalar(const PointGeometry& pg, const Jet& f) {
    JetMat h = hessian_scalar(pg, f);
    Jet r(pg.space(), 0.0);
    for (int i = 0; i < pg.dim(); ++i)
        for (int j = 0; j < pg.dim(); ++j) r -= pg.ginv(i, j) * h(i, j);
    return r;
}

inline Jet div_vector(const PointGeometry& pg, const JetVec& V) {
    JetMat a = cov_deriv_vector(pg, V);
    Jet r(pg.space(), 0.0);
    for (int k = 0; k < pg.dim(); ++k) r += a(k, k);
    return r;
}

// One-form (Div T)_j = (nabla_k T)^k_j.
inline JetVec div_endo(const PointGeometry& pg, const JetMat& T) {
    Jet3 dt = cov_deriv_endo(pg, T);
    JetVec r(pg.dim(), Jet(pg.space(), 0.0));
    for (int j = 0; j < pg.dim(); ++j)
        for (int k = 0; k < pg.dim(); ++k) r[j] += dt(k, k, j);
    return r;
}

// d of a one-form: (dw)_ij = (d_i w_j - d_j w_i) / 2 under the ledger factor.
inline JetMat ext_deriv_oneform(const JetVec& w) {
    const int d = static_cast<int>(w.size());
    const JetSpace& sp = w[0].space();
    const double f = Conventions::ext_deriv_factor(1);
    JetMat r = JetMat::zero(sp, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r(i, j) = (w[j].deriv(i) - w[i].deriv(j)) * f;
    return r;
}

// d of a two-form: (dW)_ijk = (d_i W_jk - d_j W_ik + d_k W_ij) / 3.
inline Jet3 ext_deriv_twoform(const JetMat& W) {
    const int d = W.rows();
    const JetSpace& sp = W(0, 0).space();
    const double f = Conventions::ext_deriv_factor(2);
    Jet3 r(sp, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                r(i, j, k) = (W(j, k).deriv(i) - W(i, k).deriv(j) + W(i, j).deriv(k)) * f;
    return r;
}

// Rough Laplacian nabla*nabla V = -g^{ij}(nabla_i nabla_j V - Gamma^m_ij nabla_m V).
inline JetVec rough_laplacian_vector(const PointGeometry& pg, const JetVec& V) {
    const int d = pg.dim();
    const JetSpace& sp = pg.space();
    JetMat a = cov_deriv_vector(pg, V); // a(k,j) = (nabla_j V)^k
    JetVec r(d, Jet(sp, 0.0));
    for (int k = 0; k < d; ++k) {
        Jet s(sp, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Jet second = a(k, j).deriv(i);
                for (int m = 0; m < d; ++m)
                    second += pg.gamma(k, i, m) * a(m, j) - pg.gamma(m, i, j) * a(k, m);
                s += pg.ginv(i, j) * second;
            }
        r[k] = -s;
    }
    return r;
}

// [X,Y]^k = X^m d_m Y^k - Y^m d_m X^k.
inline JetVec commutator(const JetVec& X, const JetVec& Y) {
    const int d = static_cast<int>(X.size());
    const JetSpace& sp = X[0].space();
    JetVec r(d, Jet(sp, 0.0));
    for (int k = 0; k < d; ++k) {
        Jet s(sp, 0.0);
        for (int m = 0; m < d; ++m) s += X[m] * Y[k].deriv(m) - Y[m] * X[k].deriv(m);
        r[k] = s;
    }
    return r;
}

// Pointwise tensor norms against g (double-valued).
inline double vector_norm(const DMat& g, const DVec& v) { return std::sqrt(std::max(0.0, dot_g(g, v, v))); }

inline double oneform_norm(const DMat& g, const DMat& ginv, const DVec& w) {
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t j = 0; j < w.size(); ++j) s += ginv[i][j] * w[i] * w[j];
    return std::sqrt(std::max(0.0, s));
}

inline double endo_norm(const DMat& g, const DMat& ginv, const DMat& T) {
    const int d = static_cast<int>(g.size());
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) s += g[i][k] * ginv[j][l] * T[i][j] * T[k][l];
    return std::sqrt(std::max(0.0, s));
}

inline double twoform_norm(const DMat& ginv, const DMat& W) {
    const int d = static_cast<int>(ginv.size());
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) s += ginv[i][k] * ginv[j][l] * W[i][j] * W[k][l];
    return std::sqrt(std::max(0.0, s));
}

} // namespace gman
