#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spb/log_value.hpp"

namespace spb {

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    int f_lo_sign = 0;
    int f_hi_sign = 0;

    bool valid() const {
        return lo < hi && f_lo_sign != 0 && f_hi_sign != 0 && f_lo_sign != f_hi_sign;
    }
};

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

template <class F>
Bracket make_bracket(const F& f, double lo, double hi) {
    return Bracket{lo, hi, sign_of(f(lo)), sign_of(f(hi))};
}

// Bisection with secant acceleration; falls back to bisection whenever the
// secant step leaves the bracket or stalls. Deterministic.
template <class F>
double find_root(const F& f, Bracket bracket, double tol) {
    if (!bracket.valid()) throw std::invalid_argument("find_root: invalid bracket");
    double lo = bracket.lo, hi = bracket.hi;
    double f_lo = f(lo), f_hi = f(hi);
    if (sign_of(f_lo) != bracket.f_lo_sign || sign_of(f_hi) != bracket.f_hi_sign) {
        // Signs are the caller's contract; trust the fresh evaluations.
        if (sign_of(f_lo) == 0) return lo;
        if (sign_of(f_hi) == 0) return hi;
        if (sign_of(f_lo) == sign_of(f_hi))
            throw std::invalid_argument("find_root: bracket signs do not match function");
    }
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double mid;
        const double denom = f_hi - f_lo;
        if (denom != 0.0) {
            mid = lo - f_lo * (hi - lo) / denom;  // secant through the bracket ends
            const double margin = 0.01 * (hi - lo);
            if (!(mid > lo + margin && mid < hi - margin)) mid = 0.5 * (lo + hi);
        } else {
            mid = 0.5 * (lo + hi);
        }
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if (sign_of(f_mid) == sign_of(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct ScalarMaximum {
    double argmax = 0.0;
    double max = kLnZero;
};

// Coarse grid scan (log-spaced when lo > 0) followed by golden-section
// refinement around the best grid cell. Ties break toward the smallest
// argument; -inf values mark infeasible points. A completely flat or
// infeasible function returns lo.
template <class F>
ScalarMaximum maximize_scalar(const F& f, double lo, double hi, double tol,
                              int grid_points = 200) {
    if (!(lo < hi)) throw std::invalid_argument("maximize_scalar: requires lo < hi");
    if (grid_points < 2) grid_points = 2;
    const bool log_spaced = lo > 0.0;
    std::vector<double> xs(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / (grid_points - 1);
        xs[i] = log_spaced ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                           : lo + t * (hi - lo);
    }
    xs.front() = lo;
    xs.back() = hi;

    int best = 0;
    double best_val = f(xs[0]);
    for (int i = 1; i < grid_points; ++i) {
        const double v = f(xs[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (is_ln_zero(best_val) || std::isnan(best_val)) return {lo, best_val};

    double a = xs[best > 0 ? best - 1 : 0];
    double b = xs[best + 1 < grid_points ? best + 1 : grid_points - 1];
    if (!(a < b)) return {xs[best], best_val};

    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    double arg_best = xs[best];
    auto consider = [&](double x, double v) {
        if (v > best_val || (v == best_val && x < arg_best)) {
            best_val = v;
            arg_best = x;
        }
    };
    consider(x1, f1);
    consider(x2, f2);
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            consider(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            consider(x2, f2);
        }
    }
    return {arg_best, best_val};
}

}  // namespace spb
