#pragma once
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gman/chart.hpp"
#include "gman/jet.hpp"

namespace gman {

using JetVec = std::vector<Jet>;

// Dense matrix of jets, row-major. Small (chart dimension squared).
class JetMat {
public:
    JetMat() : rows_(0), cols_(0) {}
    JetMat(int rows, int cols, const Jet& fill) : rows_(rows), cols_(cols), m_(size_t(rows) * cols, fill) {}
    static JetMat zero(const JetSpace& sp, int rows, int cols) { return JetMat(rows, cols, Jet(sp, 0.0)); }
    static JetMat identity(const JetSpace& sp, int n) {
        JetMat m = zero(sp, n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Jet(sp, 1.0);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Jet& operator()(int i, int j) { return m_[size_t(i) * cols_ + j]; }
    const Jet& operator()(int i, int j) const { return m_[size_t(i) * cols_ + j]; }

    JetMat operator+(const JetMat& o) const {
        JetMat r = *this;
        for (size_t k = 0; k < m_.size(); ++k) r.m_[k] += o.m_[k];
        return r;
    }
    JetMat operator-(const JetMat& o) const {
        JetMat r = *this;
        for (size_t k = 0; k < m_.size(); ++k) r.m_[k] -= o.m_[k];
        return r;
    }
    JetMat operator*(const JetMat& o) const {
        JetMat r = zero(m_[0].space(), rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k)
                for (int j = 0; j < o.cols_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
        return r;
    }

    // Gauss-Jordan inverse with partial pivoting on jet values.
    JetMat inverse() const {
        const int n = rows_;
        const JetSpace& sp = m_[0].space();
        JetMat a = *this;
        JetMat inv = identity(sp, n);
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::abs(a(r, col).value()) > std::abs(a(piv, col).value())) piv = r;
            if (std::abs(a(piv, col).value()) < 1e-300)
                throw DegenerateMetricError("singular matrix in jet inverse");
            if (piv != col)
                for (int j = 0; j < n; ++j) {
                    std::swap(a(piv, j), a(col, j));
                    std::swap(inv(piv, j), inv(col, j));
                }
            Jet inv_piv = reciprocal(a(col, col));
            for (int j = 0; j < n; ++j) {
                a(col, j) = a(col, j) * inv_piv;
                inv(col, j) = inv(col, j) * inv_piv;
            }
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                Jet f = a(r, col);
                for (int j = 0; j < n; ++j) {
                    a(r, j) -= f * a(col, j);
                    inv(r, j) -= f * inv(col, j);
                }
            }
        }
        return inv;
    }

private:
    int rows_, cols_;
    std::vector<Jet> m_;
};

inline JetVec matvec(const JetMat& m, const JetVec& v) {
    JetVec r(m.rows(), Jet(v[0].space(), 0.0));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
    return r;
}

// Fields are point-to-components maps evaluated in jet arithmetic, so all
// partial derivatives up to the requested order come out exact. A field is
// pure after construction; evaluation at distinct points may run
// concurrently.

struct ScalarField {
    std::shared_ptr<const Chart> chart;
    std::function<Jet(std::span<const Jet>)> fn;

    Jet at(const Point& p, int order) const {
        auto coords = chart->seed(chart->wrap(p), order);
        return fn(coords);
    }
    double value(const Point& p) const { return at(p, 0).value(); }
};

struct VectorField {
    std::shared_ptr<const Chart> chart;
    std::function<JetVec(std::span<const Jet>)> fn; // components X^i

    JetVec at(const Point& p, int order) const { return fn(chart->seed(chart->wrap(p), order)); }
};

struct OneFormField {
    std::shared_ptr<const Chart> chart;
    std::function<JetVec(std::span<const Jet>)> fn; // components w_i

    JetVec at(const Point& p, int order) const { return fn(chart->seed(chart->wrap(p), order)); }
};

struct EndoField {
    std::shared_ptr<const Chart> chart;
    std::function<JetMat(std::span<const Jet>)> fn; // components T^i_j

    JetMat at(const Point& p, int order) const { return fn(chart->seed(chart->wrap(p), order)); }
};

struct MetricField {
    std::shared_ptr<const Chart> chart;
    std::function<JetMat(std::span<const Jet>)> fn; // components g_ij

    JetMat at(const Point& p, int order) const { return fn(chart->seed(chart->wrap(p), order)); }
};

// Constant-coefficient vector field helper (used by samplers and tests).
inline VectorField constant_vector_field(std::shared_ptr<const Chart> chart, std::vector<double> comps) {
    return VectorField{chart, [comps](std::span<const Jet> c) {
                           JetVec v;
                           v.reserve(comps.size());
                           for (double a : comps) v.push_back(Jet(c[0].space(), a));
                           return v;
                       }};
}

} // namespace gman
