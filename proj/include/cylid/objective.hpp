#pragma once

// Multifrequency best-fit machinery: the relative-misfit functional
//
//   Phi(Q) = (1/P) sum_p ||w_p(Q) - g_p||^2 / ||g_p||^2,
//
// synthetic datasets with a seeded uniform noise model, and the
// area-weighted identification error between index profiles.
//
// The data traces g_p, and the simulated traces w_p compared against them,
// are the scattered parts of the boundary fields: the incident plane wave
// cancels in every difference w - g, and normalizing by the scattered
// signal is what reproduces the reference misfit values this module is
// validated against. The squared norm of a complex trace is the sum of
// |w(theta_j)|^2, so Phi is real and nonnegative. Noise is added per angle
// and per wavenumber as delta * rms(g) * (2z - 1) * (1 + i) with z uniform
// on [0, 1); rms(g) is ||g||_2 / sqrt(L) so delta measures the perturbation
// against the typical per-point signal amplitude. Degraded forward
// evaluations map to a large finite penalty so stochastic searches can
// always retreat.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cylid/forward.hpp"
#include "cylid/layers.hpp"

namespace cylid {

struct ProbeSet {
    std::vector<double> wavenumbers;
    std::vector<double> angles;  // shared across wavenumbers, increasing

    std::size_t count() const { return wavenumbers.size(); }
};

// theta_l = 2 pi l / count, l = 1..count
inline std::vector<double> uniform_angles(int count) {
    if (count < 1) throw std::domain_error("uniform_angles: count must be >= 1");
    std::vector<double> a(static_cast<std::size_t>(count));
    for (int l = 1; l <= count; ++l)
        a[static_cast<std::size_t>(l - 1)] = 2.0 * std::numbers::pi * l / count;
    return a;
}

inline ProbeSet default_probe() { return {{3.0, 6.5, 10.0}, uniform_angles(120)}; }

inline void validate(const ProbeSet& p) {
    if (p.wavenumbers.empty()) throw std::invalid_argument("probe: need at least one wavenumber");
    for (double k : p.wavenumbers)
        if (!(k > 0.0)) throw std::invalid_argument("probe: wavenumbers must be positive");
    if (p.angles.empty()) throw std::invalid_argument("probe: need at least one angle");
    for (std::size_t j = 0; j < p.angles.size(); ++j) {
        if (p.angles[j] < 0.0 || p.angles[j] > 2.0 * std::numbers::pi + 1e-12)
            throw std::invalid_argument("probe: angles must lie in [0, 2pi]");
        if (j > 0 && !(p.angles[j] > p.angles[j - 1]))
            throw std::invalid_argument("probe: angles must be strictly increasing");
    }
}

struct ScatterDataset {
    ProbeSet probe;
    std::vector<std::vector<Complex>> data;  // one trace per wavenumber
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    double R = 1.0;
};

inline double norm2(const std::vector<Complex>& values) {
    if (values.empty()) throw std::domain_error("norm2: empty vector");
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s);
}

namespace detail {

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

// Clean scattered-field traces of a config over a probe set; throws if the
// forward solve degrades (the config is then unusable as a data source).
inline std::vector<std::vector<Complex>> clean_traces(const LayerConfig& config,
                                                      const ProbeSet& probe) {
    validate(probe);
    std::vector<std::vector<Complex>> out(probe.count());
    ForwardWorkspace w;
    for (std::size_t p = 0; p < probe.count(); ++p) {
        const auto kernel = make_angle_kernel(probe.wavenumbers[p], config.R, probe.angles);
        if (!scattered_values(config, kernel, w, out[p]))
            throw std::runtime_error("clean_traces: forward solve degraded for this config");
    }
    return out;
}

// Synthetic dataset: the clean traces of `config`, plus, when delta > 0,
// one fresh uniform draw per angle per wavenumber. delta = 0 is bit-exact
// clean and independent of the seed.
inline ScatterDataset synthesize(const LayerConfig& config, const ProbeSet& probe, double delta,
                                 std::uint64_t seed) {
    if (delta < 0.0) throw std::domain_error("synthesize: delta must be >= 0");
    ScatterDataset ds;
    ds.probe = probe;
    ds.noise_level = delta;
    ds.seed = seed;
    ds.R = config.R;
    ds.data = clean_traces(config, probe);
    if (delta > 0.0) {
        std::mt19937_64 rng(seed);
        const double root_l = std::sqrt(static_cast<double>(probe.angles.size()));
        for (auto& trace : ds.data) {
            const double rms = norm2(trace) / root_l;
            for (auto& v : trace) {
                const double z = detail::uniform01(rng);
                const double bump = delta * rms * (2.0 * z - 1.0);
                v += Complex{bump, bump};
            }
        }
    }
    return ds;
}

struct ObjectiveSpec {
    ScatterDataset dataset;
    AdmissibleSet admissible;
    double penalty_value = 1e6;

    // derived, fixed at construction
    std::vector<AngleKernel> kernels;
    std::vector<double> norm_sq;  // ||g_p||^2

    ObjectiveSpec(ScatterDataset ds, AdmissibleSet adm, double penalty = 1e6)
        : dataset(std::move(ds)), admissible(adm), penalty_value(penalty) {
        validate(dataset.probe);
        if (dataset.data.size() != dataset.probe.count())
            throw std::invalid_argument("objective: dataset/probe size mismatch");
        if (std::fabs(dataset.R - admissible.R) > 1e-12)
            throw std::invalid_argument("objective: dataset and admissible radii differ");
        if (!(penalty_value > 0.0)) throw std::invalid_argument("objective: penalty must be positive");
        kernels.reserve(dataset.probe.count());
        norm_sq.reserve(dataset.probe.count());
        for (std::size_t p = 0; p < dataset.probe.count(); ++p) {
            if (dataset.data[p].size() != dataset.probe.angles.size())
                throw std::invalid_argument("objective: trace length mismatch");
            kernels.push_back(
                make_angle_kernel(dataset.probe.wavenumbers[p], dataset.R, dataset.probe.angles));
            const double n = norm2(dataset.data[p]);
            if (!(n > 0.0))
                throw std::invalid_argument(
                    "objective: zero-norm data trace (non-scattering truth?)");
            norm_sq.push_back(n * n);
        }
    }
};

// The best-fit functional. Throws on inadmissible configs; degraded forward
// evaluations return the penalty value.
inline double phi(const LayerConfig& config, const ObjectiveSpec& spec) {
    if (!spec.admissible.contains(config, 1e-9))
        throw std::domain_error("phi: config outside the admissible set");
    const LayerConfig q = sanitize(config);
    thread_local ForwardWorkspace ws;
    thread_local std::vector<Complex> trace;
    double acc = 0.0;
    for (std::size_t p = 0; p < spec.kernels.size(); ++p) {
        if (!scattered_values(q, spec.kernels[p], ws, trace)) return spec.penalty_value;
        double misfit = 0.0;
        const auto& g = spec.dataset.data[p];
        for (std::size_t j = 0; j < g.size(); ++j) misfit += std::norm(trace[j] - g[j]);
        acc += misfit / spec.norm_sq[p];
    }
    return acc / static_cast<double>(spec.kernels.size());
}

// Area-weighted relative L1 discrepancy between two index profiles over the
// disk of radius R; piecewise-constant profiles make the integral exact.
inline double epsilon_err(const LayerConfig& candidate, const LayerConfig& truth) {
    if (std::fabs(candidate.R - truth.R) > 1e-12)
        throw std::domain_error("epsilon_err: configs have different observation radii");
    const LayerConfig a = sanitize(candidate);
    const LayerConfig b = sanitize(truth);
    std::vector<double> cuts{0.0};
    cuts.insert(cuts.end(), a.radii.begin(), a.radii.end());
    cuts.insert(cuts.end(), b.radii.begin(), b.radii.end());
    cuts.push_back(truth.R);
    std::sort(cuts.begin(), cuts.end());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double lo = cuts[i - 1], hi = cuts[i];
        if (!(hi > lo)) continue;
        const double area = std::numbers::pi * (hi * hi - lo * lo);
        const double mid = 0.5 * (lo + hi);
        num += area * std::fabs(a.index_at(mid) - b.index_at(mid));
        den += area * b.index_at(mid);
    }
    return num / den;
}

}  // namespace cylid
