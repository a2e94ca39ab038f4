#pragma once

// Cylindrical Bessel functions J_l, Y_l and the Hankel function H_l^(1),
// with first derivatives, for integer orders l >= 0 and real x > 0.
//
// J_0..J_n come from a single downward (Miller) recurrence pass normalized
// with J_0 + 2*sum_{k>=1} J_{2k} = 1. Y_0 and Y_1 use the ascending series
// below x = 16 and the Hankel asymptotic expansion above it; higher orders
// follow the stable upward recurrence. Derivatives obey
// f_l' = f_{l-1} - (l/x) f_l and f_0' = -f_1.
//
// |Y_l| grows without bound as l grows at fixed x. Values whose magnitude
// (or whose derivative's magnitude) would exceed bessel_overflow_clamp are
// clamped to +-bessel_overflow_clamp and flagged as saturated; callers must
// treat saturated orders as unusable.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cylid {

struct CylinderFunctions {
    int order = 0;
    double argument = 0.0;
    double j = 0.0;       // J_l(x)
    double jprime = 0.0;  // J_l'(x)
    double y = 0.0;       // Y_l(x)
    double yprime = 0.0;  // Y_l'(x)
    bool saturated = false;
};

struct HankelFunctions {
    int order = 0;
    double argument = 0.0;
    std::complex<double> h;       // H_l^(1)(x) = J_l(x) + i Y_l(x)
    std::complex<double> hprime;  // H_l^(1)'(x)
    bool saturated = false;
};

inline constexpr double bessel_overflow_clamp = 1e250;

// (-1)^l: J_{-l} = parity_sign(l) * J_l, and likewise for Y_l and H_l^(1).
constexpr int parity_sign(int l) noexcept { return (l % 2 == 0) ? 1 : -1; }

// Reusable buffers; bessel_fill writes j/jp/y/yp for orders 0..max(n,1).
struct BesselWorkspace {
    std::vector<double> j, jp, y, yp;
    std::vector<long double> scratch;
    int order_max = -1;
    double argument = 0.0;
    int sat_from = 0;  // orders >= sat_from are saturated

    bool saturated(int l) const { return l >= sat_from; }
};

namespace detail {

inline constexpr long double pi_l = std::numbers::pi_v<long double>;
inline constexpr long double egamma_l = std::numbers::egamma_v<long double>;

// Downward recurrence for J_0..J_n, normalized by J_0 + 2 sum J_{2k} = 1.
// Unnormalized values are kept in long double; an occasional rescale guards
// against overflow at very small x.
inline void bessel_j_downward(int n, double x, BesselWorkspace& w) {
    const long double lx = x;
    int start = std::max(n, static_cast<int>(std::ceil(x)));
    start += 44 + static_cast<int>(4.0 * std::cbrt(static_cast<double>(start)));

    w.scratch.assign(static_cast<std::size_t>(n) + 1, 0.0L);
    long double fp = 0.0L;      // f_{l+1}
    long double fc = 1e-32L;    // f_l, arbitrary seed at l = start
    long double sum = (start % 2 == 0) ? 2.0L * fc : 0.0L;

    for (int l = start; l >= 1; --l) {
        long double fm = (2.0L * l / lx) * fc - fp;  // f_{l-1}
        fp = fc;
        fc = fm;
        const int m = l - 1;
        if (m <= n) w.scratch[static_cast<std::size_t>(m)] = fc;
        if (m == 0)
            sum += fc;
        else if (m % 2 == 0)
            sum += 2.0L * fc;
        if (std::fabs(static_cast<double>(fc)) > 1e280 || !std::isfinite(static_cast<double>(fc))) {
            // rescale everything accumulated so far
            const long double s = 1e-280L;
            fc *= s;
            fp *= s;
            sum *= s;
            for (int t = m; t <= n; ++t) w.scratch[static_cast<std::size_t>(t)] *= s;
        }
    }
    const long double norm = 1.0L / sum;
    for (int l = 0; l <= n; ++l)
        w.j[static_cast<std::size_t>(l)] =
            static_cast<double>(w.scratch[static_cast<std::size_t>(l)] * norm);
}

// P/Q Hankel asymptotic expansion, usable for x >= 16 at orders 0 and 1.
inline long double bessel_y_asymptotic(int n, long double x) {
    const long double mu = 4.0L * n * n;
    const long double ix8 = 1.0L / (8.0L * x);
    long double p = 1.0L, q = 0.0L;
    long double term = 1.0L;
    long double prev = std::numeric_limits<long double>::max();
    for (int k = 1; k <= 40; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        term *= (mu - odd * odd) * ix8 / static_cast<long double>(k);
        const long double mag = fabsl(term);
        if (k > 4 && mag > prev) break;  // past the smallest term
        prev = mag;
        switch (k & 3) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            default: p += term; break;
        }
        if (mag < 1e-25L) break;
    }
    const long double chi = x - (2 * n + 1) * pi_l / 4.0L;
    return sqrtl(2.0L / (pi_l * x)) * (p * sinl(chi) + q * cosl(chi));
}

// Y_0 and Y_1 from the ascending series (x < 16) or the asymptotic form.
// j0, j1 are the already computed J values at x.
inline void bessel_y01(double x, double j0, double j1, double& y0, double& y1) {
    const long double lx = x;
    if (x >= 16.0) {
        y0 = static_cast<double>(bessel_y_asymptotic(0, lx));
        y1 = static_cast<double>(bessel_y_asymptotic(1, lx));
        return;
    }
    const long double t = lx * lx / 4.0L;
    const long double lg = logl(lx / 2.0L) + egamma_l;
    const int k_min = static_cast<int>(x / 2) + 2;

    long double acc0 = 0.0L, term = 1.0L, hk = 0.0L;
    for (int k = 1; k <= 200; ++k) {
        term *= t / (static_cast<long double>(k) * k);
        hk += 1.0L / k;
        const long double c = ((k & 1) ? term : -term) * hk;
        acc0 += c;
        if (fabsl(c) < 1e-24L * (fabsl(acc0) + 1e-30L) && k > k_min) break;
    }
    y0 = static_cast<double>((2.0L / pi_l) * (lg * static_cast<long double>(j0) + acc0));

    long double acc1 = 0.0L, u = lx / 2.0L;
    long double ha = 0.0L, hb = 1.0L;  // H_k and H_{k+1}
    for (int k = 0; k <= 200; ++k) {
        if (k > 0) {
            u *= t / (static_cast<long double>(k) * (k + 1));
            ha += 1.0L / k;
            hb += 1.0L / (k + 1);
        }
        const long double c = ((k & 1) ? -u : u) * (ha + hb);
        acc1 += c;
        if (fabsl(c) < 1e-24L * (fabsl(acc1) + 1e-30L) && k > k_min) break;
    }
    y1 = static_cast<double>((2.0L / pi_l) * lg * static_cast<long double>(j1) -
                             2.0L / (pi_l * lx) - acc1 / pi_l);
}

}  // namespace detail

// Fill w with J, J', Y, Y' for orders 0..max(order_max, 1) at x.
inline void bessel_fill(int order_max, double x, BesselWorkspace& w) {
    if (!(x > 0.0)) throw std::domain_error("bessel_fill: argument must be positive");
    if (order_max < 0) throw std::domain_error("bessel_fill: order_max must be >= 0");

    const int n = std::max(order_max, 1);
    const std::size_t sz = static_cast<std::size_t>(n) + 1;
    w.j.resize(sz);
    w.jp.resize(sz);
    w.y.resize(sz);
    w.yp.resize(sz);
    w.order_max = order_max;
    w.argument = x;
    w.sat_from = n + 1;

    detail::bessel_j_downward(n, x, w);
    w.jp[0] = -w.j[1];
    for (int l = 1; l <= n; ++l) w.jp[static_cast<std::size_t>(l)] =
        w.j[static_cast<std::size_t>(l - 1)] - (static_cast<double>(l) / x) * w.j[static_cast<std::size_t>(l)];

    double y0, y1;
    detail::bessel_y01(x, w.j[0], w.j[1], y0, y1);

    const long double lx = x;
    long double ym = y0, yc = y1;
    auto clamp_store = [&](int l, long double v) {
        double d = static_cast<double>(v);
        if (std::fabs(d) > bessel_overflow_clamp || !std::isfinite(d)) {
            d = std::copysign(bessel_overflow_clamp, d);
            if (l < w.sat_from) w.sat_from = l;
        }
        w.y[static_cast<std::size_t>(l)] = d;
    };
    clamp_store(0, ym);
    clamp_store(1, yc);
    for (int l = 1; l < n; ++l) {
        long double yn;
        if (fabsl(yc) > 1e4600L) {
            yn = copysignl(1e4600L, yc);  // sign is stable in the growth regime
        } else {
            yn = (2.0L * l / lx) * yc - ym;
        }
        ym = yc;
        yc = yn;
        clamp_store(l + 1, yn);
    }

    auto clamp_deriv = [&](int l, double v) {
        if (std::fabs(v) > bessel_overflow_clamp || !std::isfinite(v)) {
            v = std::copysign(bessel_overflow_clamp, v);
            if (l < w.sat_from) w.sat_from = l;
        }
        w.yp[static_cast<std::size_t>(l)] = v;
    };
    clamp_deriv(0, -w.y[1]);
    for (int l = 1; l <= n; ++l)
        clamp_deriv(l, w.y[static_cast<std::size_t>(l - 1)] -
                           (static_cast<double>(l) / x) * w.y[static_cast<std::size_t>(l)]);
}

inline std::vector<CylinderFunctions> bessel_jy(int order_max, double x) {
    BesselWorkspace w;
    bessel_fill(order_max, x, w);
    std::vector<CylinderFunctions> out(static_cast<std::size_t>(order_max) + 1);
    for (int l = 0; l <= order_max; ++l) {
        auto& o = out[static_cast<std::size_t>(l)];
        const auto i = static_cast<std::size_t>(l);
        o = {l, x, w.j[i], w.jp[i], w.y[i], w.yp[i], w.saturated(l)};
    }
    return out;
}

inline std::vector<HankelFunctions> hankel1(int order_max, double x) {
    BesselWorkspace w;
    bessel_fill(order_max, x, w);
    std::vector<HankelFunctions> out(static_cast<std::size_t>(order_max) + 1);
    for (int l = 0; l <= order_max; ++l) {
        auto& o = out[static_cast<std::size_t>(l)];
        const auto i = static_cast<std::size_t>(l);
        o = {l, x, {w.j[i], w.y[i]}, {w.jp[i], w.yp[i]}, w.saturated(l)};
    }
    return out;
}

}  // namespace cylid
