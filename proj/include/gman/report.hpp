#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gman/geometry.hpp"

namespace gman {

inline const char* version() { return "0.1.0"; }

struct ResidualEntry {
    double max_abs = 0.0;
    double mean_abs = 0.0; // mean over samples of the per-sample max-abs
    int samples = 0;
    double tolerance = 0.0;
    bool pass = false;
    bool flagged = false; // carries an interpretation note (see notes map)
};

// Named-identity residual report. Entry order is the fixed identity list,
// identical in every report; reduction is sequential in sample order so
// two runs with the same seed are bitwise identical.
struct ResidualReport {
    std::string structure;
    uint64_t seed = 0;
    int samples = 0;
    double tolerance = 0.0;
    std::vector<std::string> entry_order;
    std::map<std::string, ResidualEntry> entries;
    std::map<std::string, std::string> notes;
    std::vector<std::string> warnings;

    bool all_pass() const {
        for (const auto& [k, e] : entries)
            if (!e.pass) return false;
        return true;
    }

    void add_sample(const std::string& name, double value) {
        auto it = entries.find(name);
        if (it == entries.end()) {
            entry_order.push_back(name);
            it = entries.emplace(name, ResidualEntry{}).first;
        }
        auto& e = it->second;
        e.max_abs = std::max(e.max_abs, value);
        e.mean_abs += value; // finalized later
        e.samples += 1;
    }

    void finalize(double tol) {
        tolerance = tol;
        for (auto& [k, e] : entries) {
            if (e.samples > 0) e.mean_abs /= e.samples;
            e.tolerance = tol;
            e.pass = e.max_abs < tol;
        }
    }
};

// Convention ledger embedded in every report header.
inline std::map<std::string, std::string> convention_ledger() {
    return {
        {"curvature_sign", Conventions::curvature()},
        {"exterior_derivative", Conventions::exterior()},
        {"d_eta_factor", "1/2 (one-forms), so d eta^i(X,Y) = g(X, phi Y) holds exactly on the catalog"},
        {"divergence", Conventions::divergence()},
        {"laplacian_sign", Conventions::laplacian()},
        {"rough_laplacian", "nabla*nabla V = -sum_a (nabla_a nabla_a V - nabla_{nabla_a a} V), positive spectrum"},
        {"field_set", "identities with a free X range over coordinate fields, all xi_i, and 3 random constant fields per sample"},
    };
}

} // namespace gman
