#pragma once

// Direct transmission problem for a concentric multilayer cylinder probed
// by a unit plane wave travelling along +x. Separation of variables turns
// the problem into one small linear system per angular mode l:
//
//   u_1 = sum a_{1,l} J_l(k_1 r) e^{il theta}                (innermost)
//   u_m = sum (a_{m,l} J_l(k_m r) + b_{m,l} Y_l(k_m r)) e^{il theta}
//   u   = e^{i k_0 x} + sum A_l H_l^(1)(k_0 r) e^{il theta}  (outside)
//
// with u and du/dr continuous across every interface, k_m = k_0 sqrt(n_m).
// Rotational symmetry gives the mode-(-l) coefficients from mode l, so the
// field on the observation circle reduces to a cosine series.
//
// Each mode is solved by propagating the regular interior solution outward
// with closed-form 2 x 2 interface transfers (their inverses come from the
// Bessel Wronskian, so no elimination is needed) and matching incident plus
// scattered waves at the surface. The per-layer dynamic range is absorbed
// by exact power-of-two rescaling. scatter_coefficients returns only the
// scattered amplitudes A_l (the objective's hot path); solve_modes also
// reconstructs the interior coefficients for inspection and for the
// interface-residual checks.
//
// Modes whose Bessel values saturate, or whose surface matching degenerates,
// are flagged: they fall back to the incident-only solution (A_l = 0) and
// mark the evaluation as degraded.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cylid/bessel.hpp"
#include "cylid/layers.hpp"

namespace cylid {

using Complex = std::complex<double>;

inline int default_mode_cap(double k0, double R) {
    const double kr = k0 * R;
    return static_cast<int>(std::ceil(kr + 4.0 * std::cbrt(kr) + 12.0));
}

struct ModeSolution {
    int mode = 0;
    std::vector<Complex> interior;  // a_1, a_2, b_2, ..., a_N, b_N
    Complex scattered;              // A_l
    bool degraded = false;
};

struct ScatterCoefficients {
    std::vector<Complex> a;  // A_0 .. A_{l_max}
    bool degraded = false;
};

struct BoundaryField {
    double k0 = 0.0;
    std::vector<double> angles;
    std::vector<Complex> values;
    bool degraded = false;
};

// Scratch buffers reused across forward solves.
struct ForwardWorkspace {
    std::vector<BesselWorkspace> arrays;
    std::vector<double> wavenumbers;  // k_m per layer
    int n_layers = 0;
    double k0 = 0.0;
    int l_max = 0;

    // array index of medium m evaluated at r_m
    static std::size_t at_outer(int m) { return m == 1 ? 0 : static_cast<std::size_t>(2 * m - 2); }
    // array index of medium m evaluated at r_{m-1} (m >= 2)
    static std::size_t at_inner(int m) { return static_cast<std::size_t>(2 * m - 3); }
    std::size_t exterior() const { return static_cast<std::size_t>(2 * n_layers - 1); }
};

namespace detail {

inline Complex unit_i_pow(int l) {
    switch (l & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Bessel data at every (medium, interface radius) pair of a sanitized config.
inline void fill_eval_arrays(const LayerConfig& q, double k0, int l_max, ForwardWorkspace& w) {
    const int n = q.layer_count();
    w.n_layers = n;
    w.k0 = k0;
    w.l_max = l_max;
    if (n == 0) return;
    w.wavenumbers.resize(static_cast<std::size_t>(n) + 1);
    for (int m = 1; m <= n; ++m)
        w.wavenumbers[static_cast<std::size_t>(m)] = k0 * std::sqrt(q.indices[static_cast<std::size_t>(m - 1)]);
    w.arrays.resize(static_cast<std::size_t>(2 * n));
    bessel_fill(l_max, w.wavenumbers[1] * q.radii[0], w.arrays[0]);
    for (int m = 2; m <= n; ++m) {
        const double km = w.wavenumbers[static_cast<std::size_t>(m)];
        bessel_fill(l_max, km * q.radii[static_cast<std::size_t>(m - 2)], w.arrays[ForwardWorkspace::at_inner(m)]);
        bessel_fill(l_max, km * q.radii[static_cast<std::size_t>(m - 1)], w.arrays[ForwardWorkspace::at_outer(m)]);
    }
    bessel_fill(l_max, k0 * q.radii[static_cast<std::size_t>(n - 1)], w.arrays[w.exterior()]);
}

inline bool mode_saturated(const ForwardWorkspace& w, int l) {
    for (const auto& a : w.arrays)
        if (l >= a.sat_from) return true;
    return false;
}

// Per-layer record of the propagated interior direction: true coefficients
// are (va, vb) * 2^e2 up to one overall factor fixed at the surface.
struct TransferTrace {
    std::vector<double> va, vb;
    std::vector<int> e2;
};

// Propagate the regular interior solution outward; returns the (value,
// radial derivative) pair of the layer-N solution at r_N, up to an overall
// factor that cancels in the scattered coefficient. Rescaling uses exact
// powers of two so the propagated direction carries no rounding from it.
inline bool transfer_to_surface(const LayerConfig& q, const ForwardWorkspace& w, int l,
                                double& value, double& deriv, TransferTrace* trace = nullptr) {
    const int n = w.n_layers;
    double va = 1.0, vb = 0.0;
    int e2 = 0;
    for (int m = 1; m <= n; ++m) {
        if (trace) {
            trace->va[static_cast<std::size_t>(m - 1)] = va;
            trace->vb[static_cast<std::size_t>(m - 1)] = vb;
            trace->e2[static_cast<std::size_t>(m - 1)] = e2;
        }
        const auto& in = w.arrays[ForwardWorkspace::at_outer(m)];
        const auto i = static_cast<std::size_t>(l);
        const double km = w.wavenumbers[static_cast<std::size_t>(m)];
        value = va * in.j[i] + vb * in.y[i];
        deriv = km * (va * in.jp[i] + vb * in.yp[i]);
        if (m == n) break;
        const auto& out = w.arrays[ForwardWorkspace::at_inner(m + 1)];
        const double kn = w.wavenumbers[static_cast<std::size_t>(m + 1)];
        const double rm = q.radii[static_cast<std::size_t>(m - 1)];
        const double half_pi_r = std::numbers::pi * rm / 2.0;
        va = half_pi_r * (kn * out.yp[i] * value - out.y[i] * deriv);
        vb = half_pi_r * (-kn * out.jp[i] * value + out.j[i] * deriv);
        const double s = std::max(std::fabs(va), std::fabs(vb));
        if (!std::isfinite(s) || s == 0.0) return false;
        if (s > 1e200 || s < 1e-200) {
            const int shift = std::ilogb(s);
            va = std::ldexp(va, -shift);
            vb = std::ldexp(vb, -shift);
            e2 += shift;
        }
    }
    return std::isfinite(value) && std::isfinite(deriv);
}

}  // namespace detail

// Scattered-wave coefficients A_0..A_{l_max} via the transfer-matrix path.
inline ScatterCoefficients scatter_coefficients(const LayerConfig& config, double k0, int l_max,
                                                ForwardWorkspace& w) {
    if (!(k0 > 0.0)) throw std::domain_error("scatter_coefficients: k0 must be positive");
    const LayerConfig q = sanitize(config);
    ScatterCoefficients out;
    out.a.assign(static_cast<std::size_t>(l_max) + 1, Complex{0.0, 0.0});
    const int n = q.layer_count();
    if (n == 0) return out;

    detail::fill_eval_arrays(q, k0, l_max, w);
    const auto& ext = w.arrays[w.exterior()];
    for (int l = 0; l <= l_max; ++l) {
        if (detail::mode_saturated(w, l)) {
            out.degraded = true;
            continue;
        }
        double value = 0.0, deriv = 0.0;
        if (!detail::transfer_to_surface(q, w, l, value, deriv)) {
            out.degraded = true;
            continue;
        }
        const auto i = static_cast<std::size_t>(l);
        const Complex h{ext.j[i], ext.y[i]};
        const Complex hp{ext.jp[i], ext.yp[i]};
        const Complex den = h * deriv - k0 * hp * value;
        const Complex num = detail::unit_i_pow(l) * (k0 * value * ext.jp[i] - deriv * ext.j[i]);
        if (den == 0.0 || !std::isfinite(std::abs(den))) {
            out.degraded = true;
            continue;
        }
        const Complex al = num / den;
        if (!std::isfinite(al.real()) || !std::isfinite(al.imag())) {
            out.degraded = true;
            continue;
        }
        out.a[i] = al;
    }
    return out;
}

// Full per-mode solutions including interior coefficients. The interior is
// reconstructed from the outward transfer propagation, which satisfies the
// interface conditions by construction regardless of how stiff the layer
// stack is; only the surface matching is a genuine 2 x 2 solve. Interior
// coefficient layout per mode: a_1, then (a_m, b_m) for m = 2..N.
inline std::vector<ModeSolution> solve_modes(const LayerConfig& config, double k0, int l_max) {
    if (!(k0 > 0.0)) throw std::domain_error("solve_modes: k0 must be positive");
    const LayerConfig q = sanitize(config);
    const int n = q.layer_count();
    std::vector<ModeSolution> out(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l) out[static_cast<std::size_t>(l)].mode = l;
    if (n == 0) return out;

    ForwardWorkspace w;
    detail::fill_eval_arrays(q, k0, l_max, w);
    const auto& ext = w.arrays[w.exterior()];
    const double r_n = q.radii[static_cast<std::size_t>(n - 1)];
    detail::TransferTrace tr;
    tr.va.resize(static_cast<std::size_t>(n));
    tr.vb.resize(static_cast<std::size_t>(n));
    tr.e2.resize(static_cast<std::size_t>(n));

    for (int l = 0; l <= l_max; ++l) {
        auto& sol = out[static_cast<std::size_t>(l)];
        sol.interior.assign(static_cast<std::size_t>(2 * n - 1), Complex{0.0, 0.0});
        if (detail::mode_saturated(w, l)) {
            sol.degraded = true;
            continue;
        }
        double value = 0.0, deriv = 0.0;
        if (!detail::transfer_to_surface(q, w, l, value, deriv, &tr)) {
            sol.degraded = true;
            continue;
        }
        const auto i = static_cast<std::size_t>(l);
        const Complex h{ext.j[i], ext.y[i]};
        const Complex hp{ext.jp[i], ext.yp[i]};
        const Complex den = h * deriv - k0 * hp * value;
        if (den == 0.0 || !std::isfinite(std::abs(den))) {
            sol.degraded = true;
            continue;
        }
        sol.scattered = detail::unit_i_pow(l) * (k0 * value * ext.jp[i] - deriv * ext.j[i]) / den;
        // overall interior factor, from the Wronskian of J and H at k0 r_N
        const Complex a1c = -2.0 * detail::unit_i_pow(l + 1) / (std::numbers::pi * r_n * den);
        bool finite = std::isfinite(sol.scattered.real()) && std::isfinite(sol.scattered.imag());
        const int e_surface = tr.e2[static_cast<std::size_t>(n - 1)];
        for (int m = 1; m <= n && finite; ++m) {
            const auto t = static_cast<std::size_t>(m - 1);
            const double f = std::ldexp(1.0, tr.e2[t] - e_surface);
            const Complex am = a1c * (tr.va[t] * f);
            const Complex bm = a1c * (tr.vb[t] * f);
            sol.interior[static_cast<std::size_t>(m == 1 ? 0 : 2 * m - 3)] = am;
            if (m >= 2) sol.interior[static_cast<std::size_t>(2 * m - 2)] = bm;
            finite = std::isfinite(am.real()) && std::isfinite(am.imag()) &&
                     std::isfinite(bm.real()) && std::isfinite(bm.imag());
        }
        if (!finite) {
            sol.degraded = true;
            sol.interior.assign(static_cast<std::size_t>(2 * n - 1), Complex{0.0, 0.0});
            sol.scattered = 0.0;
        }
    }
    return out;
}

// Worst interface mismatch of a dense-path solution, relative to 1 + |u|
// (values) and 1 + |du/dr| (derivatives). Degraded modes are skipped.
struct ResidualReport {
    double max_value = 0.0;
    double max_derivative = 0.0;
    int degraded_modes = 0;

    double worst() const { return std::max(max_value, max_derivative); }
};

inline ResidualReport interface_residuals(const LayerConfig& config, double k0,
                                          const std::vector<ModeSolution>& modes) {
    const LayerConfig q = sanitize(config);
    const int n = q.layer_count();
    ResidualReport rep;
    if (n == 0) return rep;
    ForwardWorkspace w;
    const int l_max = static_cast<int>(modes.size()) - 1;
    detail::fill_eval_arrays(q, k0, l_max, w);
    for (const auto& sol : modes) {
        if (sol.degraded) {
            ++rep.degraded_modes;
            continue;
        }
        const auto i = static_cast<std::size_t>(sol.mode);
        for (int m = 1; m <= n; ++m) {
            const auto& in = w.arrays[ForwardWorkspace::at_outer(m)];
            const double km = w.wavenumbers[static_cast<std::size_t>(m)];
            const Complex am = sol.interior[static_cast<std::size_t>(m == 1 ? 0 : 2 * m - 3)];
            const Complex bm = (m == 1) ? Complex{0.0, 0.0}
                                        : sol.interior[static_cast<std::size_t>(2 * m - 2)];
            const Complex u_in = am * in.j[i] + bm * in.y[i];
            const Complex du_in = km * (am * in.jp[i] + bm * in.yp[i]);
            Complex u_out, du_out;
            if (m < n) {
                const auto& ex = w.arrays[ForwardWorkspace::at_inner(m + 1)];
                const double kn = w.wavenumbers[static_cast<std::size_t>(m + 1)];
                const Complex an = sol.interior[static_cast<std::size_t>(2 * (m + 1) - 3)];
                const Complex bn = sol.interior[static_cast<std::size_t>(2 * (m + 1) - 2)];
                u_out = an * ex.j[i] + bn * ex.y[i];
                du_out = kn * (an * ex.jp[i] + bn * ex.yp[i]);
            } else {
                const auto& ex = w.arrays[w.exterior()];
                const Complex il = detail::unit_i_pow(sol.mode);
                u_out = il * ex.j[i] + sol.scattered * Complex{ex.j[i], ex.y[i]};
                du_out = k0 * (il * ex.jp[i] + sol.scattered * Complex{ex.jp[i], ex.yp[i]});
            }
            const double rv = std::abs(u_in - u_out) / (1.0 + std::max(std::abs(u_in), std::abs(u_out)));
            const double rd = std::abs(du_in - du_out) / (1.0 + std::max(std::abs(du_in), std::abs(du_out)));
            rep.max_value = std::max(rep.max_value, rv);
            rep.max_derivative = std::max(rep.max_derivative, rd);
        }
    }
    return rep;
}

// Precomputed per-wavenumber quantities on a fixed angle grid: incident
// trace, Hankel factors at R and the cosine table of the mode sum.
struct AngleKernel {
    double k0 = 0.0;
    double R = 1.0;
    int l_max = 0;
    std::vector<double> angles;
    std::vector<Complex> incident;     // e^{i k0 R cos theta_j}
    std::vector<Complex> hankel_coef;  // (l == 0 ? 1 : 2) * H_l(k0 R)
    std::vector<double> cosines;       // row l: cos(l theta_j)
};

inline AngleKernel make_angle_kernel(double k0, double R, std::vector<double> angles,
                                     int l_max = -1) {
    if (!(k0 > 0.0) || !(R > 0.0))
        throw std::domain_error("make_angle_kernel: k0 and R must be positive");
    if (l_max < 0) l_max = default_mode_cap(k0, R);
    AngleKernel k;
    k.k0 = k0;
    k.R = R;
    k.l_max = l_max;
    k.angles = std::move(angles);
    const std::size_t L = k.angles.size();
    k.incident.resize(L);
    for (std::size_t j = 0; j < L; ++j) {
        const double phase = k0 * R * std::cos(k.angles[j]);
        k.incident[j] = {std::cos(phase), std::sin(phase)};
    }
    auto h = hankel1(l_max, k0 * R);
    k.hankel_coef.resize(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l)
        k.hankel_coef[static_cast<std::size_t>(l)] = (l == 0 ? 1.0 : 2.0) * h[static_cast<std::size_t>(l)].h;
    k.cosines.resize((static_cast<std::size_t>(l_max) + 1) * L);
    for (int l = 0; l <= l_max; ++l)
        for (std::size_t j = 0; j < L; ++j)
            k.cosines[static_cast<std::size_t>(l) * L + j] = (l == 0) ? 1.0 : std::cos(l * k.angles[j]);
    return k;
}

// Scattered part of the field on the observation circle for a precomputed
// kernel; returns false when any contributing mode is degraded.
inline bool scattered_values(const LayerConfig& config, const AngleKernel& kernel,
                             ForwardWorkspace& w, std::vector<Complex>& out) {
    const auto sc = scatter_coefficients(config, kernel.k0, kernel.l_max, w);
    const std::size_t L = kernel.angles.size();
    out.assign(L, Complex{0.0, 0.0});
    if (sc.degraded) return false;
    for (int l = 0; l <= kernel.l_max; ++l) {
        const Complex c = sc.a[static_cast<std::size_t>(l)] * kernel.hankel_coef[static_cast<std::size_t>(l)];
        if (c == 0.0) continue;
        const double* row = &kernel.cosines[static_cast<std::size_t>(l) * L];
        for (std::size_t j = 0; j < L; ++j) out[j] += c * row[j];
    }
    return true;
}

// Total field: incident plane wave plus the scattered part.
inline bool boundary_values(const LayerConfig& config, const AngleKernel& kernel,
                            ForwardWorkspace& w, std::vector<Complex>& out) {
    const bool ok = scattered_values(config, kernel, w, out);
    for (std::size_t j = 0; j < kernel.angles.size(); ++j) out[j] += kernel.incident[j];
    return ok;
}

inline BoundaryField field_on_S(const LayerConfig& config, double k0,
                                std::vector<double> angles, int l_max = -1) {
    const auto kernel = make_angle_kernel(k0, config.R, std::move(angles), l_max);
    BoundaryField f;
    f.k0 = k0;
    f.angles = kernel.angles;
    ForwardWorkspace w;
    f.degraded = !boundary_values(config, kernel, w, f.values);
    return f;
}

}  // namespace cylid
