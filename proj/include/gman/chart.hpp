#pragma once
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gman/errors.hpp"
#include "gman/jet.hpp"

namespace gman {

struct Point {
    std::vector<double> x;
    int dim() const { return static_cast<int>(x.size()); }
};

// A single coordinate box, optionally periodic per coordinate. This is
// the whole universe: no atlases, no chart transitions.
class Chart {
public:
    Chart(std::vector<std::string> names,
          std::vector<std::pair<double, double>> box,
          std::vector<bool> periodic)
        : names_(std::move(names)), box_(std::move(box)), periodic_(std::move(periodic)) {
        if (names_.empty() || box_.size() != names_.size() || periodic_.size() != names_.size())
            throw DimensionError("Chart: names/box/periodic lengths disagree");
        for (auto& [lo, hi] : box_)
            if (!(hi > lo)) throw DimensionError("Chart: interval with non-positive length");
    }

    int dim() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::pair<double, double>& interval(int i) const { return box_[i]; }
    bool periodic(int i) const { return periodic_[i]; }

    int coord_index(const std::string& name) const {
        for (int i = 0; i < dim(); ++i)
            if (names_[i] == name) return i;
        return -1;
    }

    // Wrap periodic coordinates into the box; non-periodic ones unchanged.
    Point wrap(Point p) const {
        for (int i = 0; i < dim(); ++i) {
            if (!periodic_[i]) continue;
            double lo = box_[i].first, len = box_[i].second - box_[i].first;
            p.x[i] = lo + std::fmod(std::fmod(p.x[i] - lo, len) + len, len);
        }
        return p;
    }

    bool contains(const Point& p) const {
        if (p.dim() != dim()) return false;
        for (int i = 0; i < dim(); ++i) {
            if (periodic_[i]) continue;
            if (p.x[i] < box_[i].first || p.x[i] > box_[i].second) return false;
        }
        return true;
    }

    // Coordinate jets seeded at a point.
    std::vector<Jet> seed(const Point& p, int order) const {
        const JetSpace& sp = JetSpace::get(dim(), order);
        std::vector<Jet> coords;
        coords.reserve(dim());
        for (int i = 0; i < dim(); ++i) coords.push_back(Jet::variable(sp, i, p.x[i]));
        return coords;
    }

private:
    std::vector<std::string> names_;
    std::vector<std::pair<double, double>> box_;
    std::vector<bool> periodic_;
};

// Deterministic uniform sampling from the box shrunk by `shrink` per side.
// Draws are sequential from a fixed 64-bit seed, so reports reduce in a
// reproducible order.
struct Sampler {
    uint64_t seed = 42;
    int count = 200;
    double shrink = 0.05;

    std::vector<Point> draw(const Chart& chart) const {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::vector<Point> pts(count);
        for (int s = 0; s < count; ++s) {
            Point p;
            p.x.resize(chart.dim());
            for (int i = 0; i < chart.dim(); ++i) {
                auto [lo, hi] = chart.interval(i);
                double margin = shrink * (hi - lo);
                p.x[i] = lo + margin + (hi - lo - 2 * margin) * uni(rng);
            }
            pts[s] = p;
        }
        return pts;
    }
};

} // namespace gman
