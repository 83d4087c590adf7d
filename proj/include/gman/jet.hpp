#pragma once
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "gman/errors.hpp"

namespace gman {

// Multi-index of partial-derivative orders, one entry per coordinate.
using MultiIndex = std::vector<int>;

// Monomial bookkeeping for truncated multivariate Taylor arithmetic in
// `dim` variables up to total degree `order`. Immutable and cached, so
// jets can share a raw pointer.
class JetSpace {
public:
    static const JetSpace& get(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(monos_.size()); }

    const MultiIndex& mono(int k) const { return monos_[k]; }
    int degree(int k) const { return degree_[k]; }
    double factorial(int k) const { return factorial_[k]; }

    // Position of a multi-index, or -1 when its total degree exceeds order.
    int index(const MultiIndex& a) const {
        int deg = 0;
        for (int e : a) deg += e;
        if (deg > order_) return -1;
        auto it = lookup_.find(encode(a));
        return it == lookup_.end() ? -1 : it->second;
    }

    // Monomial product position, or -1 on degree overflow.
    int product(int a, int b) const { return prod_[a * size() + b]; }

    // Position of the first-degree monomial of variable i.
    int var_index(int i) const { return var_index_[i]; }

    // Position of mono(k) with variable i raised by one, or -1.
    int raise(int k, int i) const { return raise_[k * dim_ + i]; }

private:
    JetSpace(int dim, int order);
    static uint64_t encode(const MultiIndex& a) {
        uint64_t key = 0;
        for (size_t i = 0; i < a.size(); ++i) key |= uint64_t(a[i] & 0xF) << (4 * i);
        return key;
    }

    int dim_, order_;
    std::vector<MultiIndex> monos_;
    std::vector<int> degree_;
    std::vector<double> factorial_;
    std::unordered_map<uint64_t, int> lookup_;
    std::vector<int> prod_;
    std::vector<int> var_index_;
    std::vector<int> raise_;
};

inline JetSpace::JetSpace(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 1 || dim > 15 || order < 0 || order > 9)
        throw DimensionError("JetSpace: unsupported dim/order");
    // Enumerate multi-indices graded by total degree, lexicographic within.
    MultiIndex cur(dim, 0);
    for (int deg = 0; deg <= order; ++deg) {
        std::vector<MultiIndex> level;
        std::function<void(int, int)> rec = [&](int pos, int rem) {
            if (pos == dim - 1) {
                cur[pos] = rem;
                level.push_back(cur);
                return;
            }
            for (int e = rem; e >= 0; --e) {
                cur[pos] = e;
                rec(pos + 1, rem - e);
            }
        };
        rec(0, deg);
        for (auto& m : level) monos_.push_back(m);
    }
    const int n = size();
    degree_.resize(n);
    factorial_.resize(n);
    for (int k = 0; k < n; ++k) {
        int deg = 0;
        double fact = 1.0;
        for (int e : monos_[k]) {
            deg += e;
            for (int j = 2; j <= e; ++j) fact *= j;
        }
        degree_[k] = deg;
        factorial_[k] = fact;
        lookup_[encode(monos_[k])] = k;
    }
    prod_.assign(size_t(n) * n, -1);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (degree_[a] + degree_[b] > order) continue;
            MultiIndex m(dim);
            for (int i = 0; i < dim; ++i) m[i] = monos_[a][i] + monos_[b][i];
            prod_[size_t(a) * n + b] = lookup_.at(encode(m));
        }
    var_index_.resize(dim);
    for (int i = 0; i < dim; ++i) {
        MultiIndex m(dim, 0);
        m[i] = 1;
        var_index_[i] = order >= 1 ? lookup_.at(encode(m)) : -1;
    }
    raise_.assign(size_t(n) * dim, -1);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < dim; ++i) {
            if (degree_[k] + 1 > order) continue;
            MultiIndex m = monos_[k];
            m[i] += 1;
            raise_[size_t(k) * dim + i] = lookup_.at(encode(m));
        }
}

inline const JetSpace& JetSpace::get(int dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, order);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::unique_ptr<JetSpace>(new JetSpace(dim, order))).first;
    return *it->second;
}

// Truncated Taylor expansion of a scalar quantity around a point: the
// value plus all partial derivatives up to the space's order. Arithmetic
// is exact on the stored coefficients (no finite differencing anywhere).
//
// `acc` tracks how many leading degrees are trustworthy: extracting a
// coordinate derivative lowers it by one, and reads beyond it assert.
class Jet {
public:
    Jet() : sp_(nullptr), acc_(0) {}
    Jet(const JetSpace& sp, double constant) : sp_(&sp), c_(sp.size(), 0.0), acc_(sp.order()) {
        c_[0] = constant;
    }

    // Coordinate seed: value + unit first-order coefficient in variable i.
    static Jet variable(const JetSpace& sp, int i, double value) {
        Jet j(sp, value);
        if (sp.order() >= 1) j.c_[sp.var_index(i)] = 1.0;
        return j;
    }

    const JetSpace& space() const { return *sp_; }
    int accuracy() const { return acc_; }
    double value() const { return c_[0]; }

    // Exact partial derivative for a multi-index (with factorial applied).
    double partial(const MultiIndex& a) const {
        int k = sp_->index(a);
        assert(k >= 0 && sp_->degree(k) <= acc_);
        return c_[k] * sp_->factorial(k);
    }
    double partial(std::initializer_list<int> a) const { return partial(MultiIndex(a)); }

    // First partial in coordinate i.
    double d(int i) const {
        assert(acc_ >= 1);
        return c_[sp_->var_index(i)];
    }

    // The coordinate-i derivative as a jet one order less accurate.
    Jet deriv(int i) const {
        assert(acc_ >= 1);
        Jet r(*sp_, 0.0);
        const int n = sp_->size();
        for (int k = 0; k < n; ++k) {
            int up = sp_->raise(k, i);
            if (up >= 0) r.c_[k] = c_[up] * (sp_->mono(k)[i] + 1);
        }
        r.acc_ = acc_ - 1;
        return r;
    }

    Jet& operator+=(const Jet& o) {
        assert(sp_ == o.sp_);
        for (int k = 0; k < sp_->size(); ++k) c_[k] += o.c_[k];
        acc_ = std::min(acc_, o.acc_);
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        assert(sp_ == o.sp_);
        for (int k = 0; k < sp_->size(); ++k) c_[k] -= o.c_[k];
        acc_ = std::min(acc_, o.acc_);
        return *this;
    }
    Jet& operator+=(double v) { c_[0] += v; return *this; }
    Jet& operator-=(double v) { c_[0] -= v; return *this; }
    Jet& operator*=(double v) {
        for (auto& x : c_) x *= v;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator+(Jet a, double v) { a += v; return a; }
    friend Jet operator+(double v, Jet a) { a += v; return a; }
    friend Jet operator-(Jet a, double v) { a -= v; return a; }
    friend Jet operator-(double v, const Jet& a) { Jet r = -a; r += v; return r; }
    friend Jet operator*(Jet a, double v) { a *= v; return a; }
    friend Jet operator*(double v, Jet a) { a *= v; return a; }
    friend Jet operator/(Jet a, double v) { a *= 1.0 / v; return a; }
    friend Jet operator-(const Jet& a) {
        Jet r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        assert(a.sp_ == b.sp_);
        const JetSpace& sp = *a.sp_;
        Jet r(sp, 0.0);
        const int n = sp.size();
        for (int i = 0; i < n; ++i) {
            double ai = a.c_[i];
            if (ai == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                int t = sp.product(i, j);
                if (t >= 0) r.c_[t] += ai * b.c_[j];
            }
        }
        r.acc_ = std::min(a.acc_, b.acc_);
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
    friend Jet operator/(double v, const Jet& b) { return reciprocal(b) * v; }

    // f(x0 + p) for a scalar function given by its derivatives at x0.
    friend Jet compose_series(const Jet& x, std::span<const double> derivs) {
        const JetSpace& sp = *x.sp_;
        const int K = sp.order();
        Jet p = x;
        p.c_[0] = 0.0;
        double fact = 1.0;
        for (int k = 2; k <= K; ++k) fact *= k;
        Jet r(sp, derivs[K] / fact);
        for (int k = K - 1; k >= 0; --k) {
            fact = 1.0;
            for (int j = 2; j <= k; ++j) fact *= j;
            r = r * p;
            r += derivs[k] / fact;
        }
        r.acc_ = x.acc_;
        return r;
    }

    friend Jet reciprocal(const Jet& x) {
        double v = x.value();
        if (v == 0.0) throw DomainError("jet reciprocal: division by zero value");
        const int K = x.sp_->order();
        std::vector<double> d(K + 1);
        double fact = 1.0, pw = 1.0 / v;
        for (int k = 0; k <= K; ++k) {
            d[k] = (k % 2 ? -1.0 : 1.0) * fact * pw;
            fact *= (k + 1);
            pw /= v;
        }
        return compose_series(x, d);
    }

private:
    const JetSpace* sp_;
    std::vector<double> c_;
    int acc_;
};

inline Jet sin(const Jet& x) {
    const int K = x.space().order();
    double s = std::sin(x.value()), c = std::cos(x.value());
    std::vector<double> d(K + 1);
    const double cyc[4] = {s, c, -s, -c};
    for (int k = 0; k <= K; ++k) d[k] = cyc[k % 4];
    return compose_series(x, d);
}

inline Jet cos(const Jet& x) {
    const int K = x.space().order();
    double s = std::sin(x.value()), c = std::cos(x.value());
    std::vector<double> d(K + 1);
    const double cyc[4] = {c, -s, -c, s};
    for (int k = 0; k <= K; ++k) d[k] = cyc[k % 4];
    return compose_series(x, d);
}

inline Jet exp(const Jet& x) {
    const int K = x.space().order();
    std::vector<double> d(K + 1, std::exp(x.value()));
    return compose_series(x, d);
}

inline Jet log(const Jet& x) {
    double v = x.value();
    if (v <= 0.0) throw DomainError("log of non-positive value");
    const int K = x.space().order();
    std::vector<double> d(K + 1);
    d[0] = std::log(v);
    double fact = 1.0, pw = 1.0 / v;
    for (int k = 1; k <= K; ++k) {
        d[k] = (k % 2 ? 1.0 : -1.0) * fact * pw;
        fact *= k;
        pw /= v;
    }
    return compose_series(x, d);
}

inline Jet sqrt(const Jet& x) {
    double v = x.value();
    if (v <= 0.0) throw DomainError("sqrt of non-positive value");
    const int K = x.space().order();
    std::vector<double> d(K + 1);
    double coef = 1.0, pw = std::sqrt(v);
    for (int k = 0; k <= K; ++k) {
        d[k] = coef * pw;
        coef *= (0.5 - k);
        pw /= v;
    }
    return compose_series(x, d);
}

// Integer power, exact for any base value (including zero).
inline Jet powi(const Jet& x, int n) {
    if (n < 0) return reciprocal(powi(x, -n));
    Jet r(x.space(), 1.0);
    Jet b = x;
    int e = n;
    while (e > 0) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

} // namespace gman
