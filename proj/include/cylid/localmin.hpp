#pragma once

// Derivative-free local minimization over layer configurations.
//
// The search works in scaled coordinates (r_1..r_m, s_1..s_m) with
// s = sqrt(n): minimizing in sqrt(n) rescales the admissible box so radius
// and index directions carry comparable steps. The pieces, bottom up:
//
//   * brent_line_min  - bounded golden-section/parabolic line search.
//   * turtle_search   - walks a ray in steps of fixed length d_min, Brent-
//                       minimizing each segment; advances while the segment
//                       minimum sits at the far end, reverses once when it
//                       sits at the start, stops on an interior minimum.
//   * basic_local_min - per cycle: probe every coordinate direction from
//                       the current point, reorder the directions by probe
//                       quality, sweep them sequentially with turtle
//                       searches, then search along the net displacement.
//   * reduce          - merges adjacent layers (or the outermost layer and
//                       the exterior) whenever unifying their indices moves
//                       Phi by less than eps_r * Phi, shrinking the search
//                       dimension.
//   * lmm             - reduce, minimize in the reduced subspace, reduce.
//
// Every evaluated point stays inside the admissible set: steps are
// truncated at the feasible boundary, never projected through it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cylid/objective.hpp"

namespace cylid {

using Point = std::vector<double>;

struct SearchSpace {
    AdmissibleSet admissible;
    double d_min_fraction = 0.02;  // turtle step as a fraction of the box diameter
    double brent_tol = 1e-4;
    int brent_max_iter = 100;
    int max_cycles = 20;
    double cycle_rel_tol = 1e-6;
    double eps_r = 0.1;  // reduction threshold

    double s_low() const { return std::sqrt(admissible.n_low); }
    double s_high() const { return std::sqrt(admissible.n_high); }

    // diameter of the full 2M-dimensional scaled box, fixed a priori
    double diameter() const {
        const double ds = s_high() - s_low();
        const double m = static_cast<double>(admissible.max_layers);
        return std::sqrt(m * (admissible.R * admissible.R + ds * ds));
    }
    double step_length() const { return d_min_fraction * diameter(); }

    Point to_coords(const LayerConfig& q) const {
        Point p;
        p.reserve(2 * q.radii.size());
        p.insert(p.end(), q.radii.begin(), q.radii.end());
        for (double n : q.indices) p.push_back(std::sqrt(n));
        return p;
    }

    LayerConfig from_coords(std::span<const double> p) const {
        const std::size_t m = p.size() / 2;
        LayerConfig q;
        q.R = admissible.R;
        q.radii.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(m));
        q.indices.resize(m);
        for (std::size_t i = 0; i < m; ++i) q.indices[i] = p[m + i] * p[m + i];
        return q;
    }

    bool feasible(std::span<const double> p, double tol = 0.0) const {
        const std::size_t m = p.size() / 2;
        double prev = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (p[i] < prev - tol || p[i] > admissible.R + tol) return false;
            prev = p[i];
        }
        for (std::size_t i = m; i < p.size(); ++i)
            if (p[i] < s_low() - tol || p[i] > s_high() + tol) return false;
        return true;
    }

    // Largest t >= 0 with p + t*dir feasible (the feasible set is convex).
    double max_feasible_step(std::span<const double> p, std::span<const double> dir) const {
        const std::size_t m = p.size() / 2;
        double t = std::numeric_limits<double>::infinity();
        auto bound = [&t](double slack, double rate) {
            // constraint: slack + t*rate >= 0
            if (rate < 0.0) t = std::min(t, std::max(0.0, slack / -rate));
        };
        bound(p[0], dir[0]);  // r_1 >= 0
        for (std::size_t i = 0; i + 1 < m; ++i)
            bound(p[i + 1] - p[i], dir[i + 1] - dir[i]);  // ordering
        if (m > 0) bound(admissible.R - p[m - 1], -dir[m - 1]);
        for (std::size_t i = m; i < p.size(); ++i) {
            bound(p[i] - s_low(), dir[i]);
            bound(s_high() - p[i], -dir[i]);
        }
        return t;
    }

    // Repair sub-ulp constraint violations after arithmetic on coordinates.
    void snap(Point& p) const {
        const std::size_t m = p.size() / 2;
        double prev = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            p[i] = std::clamp(p[i], 0.0, admissible.R);
            if (p[i] < prev) p[i] = prev;
            prev = p[i];
        }
        for (std::size_t i = m; i < p.size(); ++i) p[i] = std::clamp(p[i], s_low(), s_high());
    }
};

struct LineMinResult {
    double t = 0.0;
    double value = 0.0;
};

// Brent's bounded minimization on [a, b]: golden-section steps with
// parabolic interpolation where it helps; never evaluates outside [a, b].
template <typename F>
LineMinResult brent_line_min(F&& f, double a, double b, double tol, int max_iter = 100) {
    if (!(a < b)) {
        if (a == b) return {a, f(a)};
        throw std::domain_error("brent_line_min: need a <= b");
    }
    constexpr double golden = 0.3819660112501051;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (a + b);
        const double tol1 = tol * std::fabs(x) + 1e-12;
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - mid) <= tol2 - 0.5 * (b - a)) break;
        bool use_golden = true;
        if (std::fabs(e) > tol1) {
            // parabola through x, v, w
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            const double e_prev = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, mid - x);
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x < mid) ? b - x : a - x;
            d = golden * e;
        }
        const double u = (std::fabs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx};
}

struct TurtleResult {
    Point point;
    double value = 0.0;
};

// One-dimensional stepwise minimization along a ray: see file header.
template <typename F>
TurtleResult turtle_search(const Point& start, const Point& direction, const SearchSpace& space,
                           F&& f, std::optional<double> f_start = std::nullopt) {
    const std::size_t dim = start.size();
    if (direction.size() != dim) throw std::domain_error("turtle_search: dimension mismatch");
    double norm = 0.0;
    for (double d : direction) norm += d * d;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw std::domain_error("turtle_search: zero direction");
    Point dir(direction);
    for (double& d : dir) d /= norm;

    const double step = space.step_length();
    const double edge = std::max(space.brent_tol, 1e-12);
    Point base(start);
    double f_base = f_start ? *f_start : f(base);
    TurtleResult best{base, f_base};

    auto point_at = [&](double t) {
        Point p(dim);
        for (std::size_t i = 0; i < dim; ++i) p[i] = base[i] + t * dir[i];
        space.snap(p);
        return p;
    };

    int reversals = 0;
    const int max_advances =
        static_cast<int>(std::ceil(2.0 * space.diameter() / step)) + 8;
    for (int adv = 0; adv < max_advances;) {
        const double t_max = std::min(space.max_feasible_step(base, dir), step);
        if (t_max <= step * 1e-12) {
            if (reversals++ == 0) {
                for (double& d : dir) d = -d;
                continue;
            }
            break;
        }
        Point far = point_at(t_max);
        const double f_far = f(far);
        auto seg = brent_line_min([&](double t) { return f(point_at(t)); }, 0.0, t_max,
                                  space.brent_tol, space.brent_max_iter);
        if (seg.value < best.value) best = {point_at(seg.t), seg.value};
        if (f_far < best.value) best = {far, f_far};

        if (f_far <= seg.value && f_far < f_base) {
            base = std::move(far);  // minimum at the segment end: keep walking
            f_base = f_far;
            ++adv;
            continue;
        }
        if (seg.value < f_base && seg.value <= f_far) {
            if (seg.t >= t_max - edge) {
                base = point_at(seg.t);  // effectively at the end as well
                f_base = seg.value;
                ++adv;
                continue;
            }
            break;  // interior minimum
        }
        // minimum at the start: reverse once, then stop
        if (reversals++ == 0) {
            for (double& d : dir) d = -d;
            continue;
        }
        break;
    }
    return best;
}

// Counts accepted iterates whose value rose; local searches must never
// record one.
struct SearchTrace {
    long increases = 0;
    double last = std::numeric_limits<double>::infinity();

    void accept(double v) {
        if (v > last) ++increases;
        last = v;
    }
    void rebase(double v) { last = v; }
};

struct BasicMinResult {
    Point point;
    double value = 0.0;
    int cycles = 0;
};

// Conjugate-direction-style minimization with probe-ordered coordinate
// sweeps; see file header.
template <typename F>
BasicMinResult basic_local_min(const Point& start, const SearchSpace& space, F&& f,
                               SearchTrace* trace = nullptr) {
    const std::size_t dim = start.size();
    Point q0(start);
    space.snap(q0);
    double f0 = f(q0);
    if (trace) trace->rebase(f0);

    std::vector<Point> axes(dim, Point(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) axes[i][i] = 1.0;

    int cycle = 0;
    while (cycle < space.max_cycles) {
        ++cycle;
        // temporary probes, used only to order the directions
        std::vector<double> probe(dim);
        for (std::size_t i = 0; i < dim; ++i)
            probe[i] = turtle_search(q0, axes[i], space, f, f0).value;
        std::vector<std::size_t> order(dim);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&probe](std::size_t a, std::size_t b) { return probe[a] < probe[b]; });

        Point q(q0);
        double fq = f0;
        for (std::size_t i : order) {
            auto r = turtle_search(q, axes[i], space, f, fq);
            q = std::move(r.point);
            fq = r.value;
            if (trace) trace->accept(fq);
        }
        Point v(dim);
        double vnorm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            v[i] = q[i] - q0[i];
            vnorm += v[i] * v[i];
        }
        if (vnorm > 0.0) {
            auto r = turtle_search(q, v, space, f, fq);
            q = std::move(r.point);
            fq = r.value;
            if (trace) trace->accept(fq);
        }
        const double improvement = (f0 - fq) / std::max(std::fabs(f0), 1e-300);
        q0 = std::move(q);
        f0 = fq;
        if (improvement < space.cycle_rel_tol) break;
    }
    return {std::move(q0), f0, cycle};
}

struct LocalMinResult {
    LayerConfig config;
    double phi_value = 0.0;
    long evaluations = 0;
    int cycles = 0;
    int reduced_layers = 0;
    long monotone_violations = 0;
};

namespace detail {

struct CountedPhi {
    const ObjectiveSpec* spec;
    long evals = 0;

    double operator()(const LayerConfig& q) {
        ++evals;
        return phi(q, *spec);
    }
};

// Merged variants of one configuration: adjacent pair (i, i+1) unified to
// one index, the outermost layer absorbed into the background, or the
// outermost layer extended out to R.
inline LayerConfig merge_pair(const LayerConfig& q, std::size_t keep_lo, double index) {
    LayerConfig out;
    out.R = q.R;
    for (std::size_t m = 0; m < q.radii.size(); ++m) {
        if (m == keep_lo) continue;  // drop the inner radius of the pair
        out.radii.push_back(q.radii[m]);
        out.indices.push_back(m == keep_lo + 1 ? index : q.indices[m]);
    }
    return out;
}

inline LayerConfig drop_outer(const LayerConfig& q) {
    LayerConfig out(q);
    out.radii.pop_back();
    out.indices.pop_back();
    return out;
}

inline LayerConfig extend_outer(const LayerConfig& q) {
    LayerConfig out(q);
    out.radii.back() = q.R;
    return out;
}

}  // namespace detail

// Dimension reduction: repeatedly merge the adjacent pair whose index
// unification changes Phi the least, while that change stays below
// eps_r * Phi. The exterior counts as a free-space layer, so the
// outermost layer can be absorbed into the background or pushed out to R.
template <typename Counted>
LayerConfig reduce_with(const LayerConfig& config, double eps_r, Counted& f,
                        double penalty_value = 1e6, double tol_width = -1.0) {
    if (!(eps_r > 0.0)) throw std::domain_error("reduce: eps_r must be positive");
    LayerConfig q = sanitize(config, tol_width);
    const int guard = 2 * q.layer_count() + 2;
    for (int round = 0; round < guard; ++round) {
        const int m = q.layer_count();
        if (m == 0) break;
        const double f0 = f(q);
        if (!(f0 > 0.0) || f0 >= penalty_value) break;  // exact fit or penalty plateau
        struct Candidate {
            LayerConfig merged;
            double diff;
        };
        std::optional<Candidate> best;
        auto consider = [&](LayerConfig merged) {
            const double fm = f(sanitize(merged, tol_width));
            const double diff = std::fabs(f0 - fm);
            if (!best || diff < best->diff) best = {std::move(merged), diff};
        };
        // lower layer of each pair adopts the upper index, exterior included
        for (int i = 2; i <= m; ++i)
            consider(detail::merge_pair(q, static_cast<std::size_t>(i - 2),
                                        q.indices[static_cast<std::size_t>(i - 1)]));
        consider(detail::drop_outer(q));
        // upper layer of each pair adopts the lower index
        for (int i = 1; i <= m - 1; ++i)
            consider(detail::merge_pair(q, static_cast<std::size_t>(i - 1),
                                        q.indices[static_cast<std::size_t>(i - 1)]));
        if (q.radii.back() < q.R - 1e-9 * q.R) consider(detail::extend_outer(q));

        if (!best || !(best->diff < eps_r * f0)) break;
        q = sanitize(best->merged, tol_width);
    }
    return q;
}

inline LayerConfig reduce(const LayerConfig& config, const ObjectiveSpec& spec, double eps_r) {
    detail::CountedPhi f{&spec};
    return reduce_with(config, eps_r, f, spec.penalty_value);
}

// The full local minimization: reduce, run the basic method in the reduced
// subspace, reduce again. The returned phi_value is re-evaluated at the
// final configuration.
inline LocalMinResult lmm(const LayerConfig& start, const ObjectiveSpec& spec,
                          const SearchSpace& space) {
    if (!spec.admissible.contains(start, 1e-9))
        throw std::domain_error("lmm: start outside the admissible set");
    detail::CountedPhi pe{&spec};
    SearchTrace trace;

    LayerConfig q = reduce_with(start, space.eps_r, pe, spec.penalty_value);
    int cycles = 0;
    if (q.layer_count() > 0) {
        auto coords = space.to_coords(q);
        auto f = [&pe, &space](const Point& p) { return pe(space.from_coords(p)); };
        auto res = basic_local_min(coords, space, f, &trace);
        cycles = res.cycles;
        q = sanitize(space.from_coords(res.point));
        trace.rebase(res.value);
    }
    q = reduce_with(q, space.eps_r, pe, spec.penalty_value);

    LocalMinResult out;
    out.config = q;
    out.phi_value = phi(q, spec);
    out.evaluations = pe.evals + 1;
    out.cycles = cycles;
    out.reduced_layers = q.layer_count();
    out.monotone_violations = trace.increases;
    return out;
}

}  // namespace cylid
