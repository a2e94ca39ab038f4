#pragma once

// Concentric multilayer scatterer model. Layer m occupies the annulus
// r_{m-1} < |x| < r_m with r_0 = 0 and holds a constant refractive index
// n_m; outside the last radius the index is 1 (free space). Fields are
// observed on the circle |x| = R.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cylid {

struct LayerConfig {
    std::vector<double> radii;    // nondecreasing, each in [0, R]
    std::vector<double> indices;  // refractive index per layer
    double R = 1.0;

    int layer_count() const { return static_cast<int>(radii.size()); }

    // Piecewise-constant profile; 1 outside the outermost layer.
    double index_at(double r) const {
        for (std::size_t m = 0; m < radii.size(); ++m)
            if (r < radii[m]) return indices[m];
        return 1.0;
    }

    bool operator==(const LayerConfig&) const = default;
};

// Box bounds for radii and indices plus the radius-ordering constraint.
struct AdmissibleSet {
    double R = 1.0;
    double n_low = 0.04;
    double n_high = 30.25;
    int max_layers = 4;

    bool contains(const LayerConfig& q, double tol = 0.0) const {
        if (q.radii.size() != q.indices.size()) return false;
        if (q.layer_count() > max_layers) return false;
        if (std::fabs(q.R - R) > tol) return false;
        double prev = 0.0;
        for (std::size_t m = 0; m < q.radii.size(); ++m) {
            const double r = q.radii[m];
            if (r < -tol || r > R + tol) return false;
            if (r < prev - tol) return false;
            prev = r;
            const double n = q.indices[m];
            if (n < n_low - tol || n > n_high + tol) return false;
        }
        return true;
    }
};

// Drop layers of width <= tol_width and merge adjacent layers with equal
// indices. The returned config produces the same field as the input.
inline LayerConfig sanitize(const LayerConfig& q, double tol_width = -1.0) {
    if (q.radii.size() != q.indices.size())
        throw std::invalid_argument("sanitize: radii/indices size mismatch");
    if (!(q.R > 0.0)) throw std::invalid_argument("sanitize: R must be positive");
    if (tol_width < 0.0) tol_width = 1e-9 * q.R;
    for (std::size_t m = 1; m < q.radii.size(); ++m)
        if (q.radii[m] < q.radii[m - 1] - tol_width)
            throw std::invalid_argument("sanitize: radii must be nondecreasing");

    LayerConfig out;
    out.R = q.R;
    double inner = 0.0;
    for (std::size_t m = 0; m < q.radii.size(); ++m) {
        const double r = std::min(q.radii[m], q.R);
        if (r - inner <= tol_width) continue;  // zero-width layer
        if (!out.radii.empty() && out.indices.back() == q.indices[m]) {
            out.radii.back() = r;  // equal-index merge
        } else {
            out.radii.push_back(r);
            out.indices.push_back(q.indices[m]);
        }
        inner = r;
    }
    return out;
}

}  // namespace cylid
