#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spb/log_value.hpp"

namespace spb {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol_ln = -60.0;      // panels this far (in ln) below the peak are accepted
    int max_subdivisions = 4000;
    double truncation_sigmas = 12.0;  // Gaussian tail cutoff for improper integrals

    void validate() const {
        if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
        if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions >= 1");
        if (!(truncation_sigmas >= 8.0))
            throw std::invalid_argument("QuadratureSpec: truncation_sigmas >= 8");
    }
};

class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string& what, double best_estimate_ln, double error_bound_ln)
        : std::runtime_error(what),
          best_estimate_ln(best_estimate_ln),
          error_bound_ln(error_bound_ln) {}

    double best_estimate_ln;
    double error_bound_ln;
};

namespace detail {

// Gauss-Kronrod 7-15 abscissae (symmetric about the midpoint) with the
// embedded 7-point Gauss weights in column 1 and Kronrod weights in column 2.
inline constexpr double kGk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529}};

// One GK15 panel in log domain; fills ln of the K15 and G7 estimates.
template <class F>
inline void gk15_ln(const F& f_ln, double a, double b, double& k15_ln, double& g7_ln) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double vals[15];
    vals[0] = f_ln(mid);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGk15[i][0];
        vals[2 * i - 1] = f_ln(mid + dx);
        vals[2 * i] = f_ln(mid - dx);
    }
    double m = kLnZero;
    for (double v : vals)
        if (v > m) m = v;
    if (is_ln_zero(m)) {
        k15_ln = kLnZero;
        g7_ln = kLnZero;
        return;
    }
    double sk = kGk15[0][2] * std::exp(vals[0] - m);
    double sg = kGk15[0][1] * std::exp(vals[0] - m);
    for (int i = 1; i < 8; ++i) {
        const double e1 = is_ln_zero(vals[2 * i - 1]) ? 0.0 : std::exp(vals[2 * i - 1] - m);
        const double e2 = is_ln_zero(vals[2 * i]) ? 0.0 : std::exp(vals[2 * i] - m);
        sk += kGk15[i][2] * (e1 + e2);
        sg += kGk15[i][1] * (e1 + e2);
    }
    const double lnh = std::log(half);
    k15_ln = m + std::log(sk) + lnh;
    g7_ln = sg > 0.0 ? m + std::log(sg) + lnh : kLnZero;
}

}  // namespace detail

// ln of the integral of exp(f_ln) over [a, b] by adaptive panel subdivision;
// panel sums are combined through max_star, so the integrand may span far
// beyond the dynamic range of double. The integrand must be non-negative
// (f_ln may return the ln-zero sentinel).
template <class F>
double integrate_ln(const F& f_ln, double a, double b, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!(a < b)) throw std::invalid_argument("integrate_ln: requires a < b");

    struct Panel {
        double a, b;
    };
    std::vector<Panel> stack;
    std::vector<double> accepted;  // ln of converged panel values
    stack.push_back({a, b});
    double peak_ln = kLnZero;  // largest panel seen, anchors the absolute floor
    int splits = 0;

    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        double k15, g7;
        detail::gk15_ln(f_ln, p.a, p.b, k15, g7);
        if (k15 > peak_ln) peak_ln = k15;
        double rel_err;
        if (is_ln_zero(k15) && is_ln_zero(g7)) {
            rel_err = 0.0;
        } else if (is_ln_zero(k15) || is_ln_zero(g7)) {
            rel_err = 1.0;
        } else {
            rel_err = std::fabs(std::expm1(g7 - k15));
        }
        const bool negligible =
            is_ln_zero(k15) || k15 + std::log(rel_err + 1e-300) <= peak_ln + spec.abs_tol_ln;
        if (rel_err <= spec.rel_tol || negligible) {
            accepted.push_back(k15);
            continue;
        }
        if (++splits > spec.max_subdivisions) {
            accepted.push_back(k15);
            for (const Panel& q : stack) {
                double k, g;
                detail::gk15_ln(f_ln, q.a, q.b, k, g);
                accepted.push_back(k);
            }
            const double est = max_star(std::span<const double>(accepted));
            throw NumericalError("integrate_ln: did not converge within max_subdivisions", est,
                                 est + std::log(rel_err));
        }
        const double mid = 0.5 * (p.a + p.b);
        stack.push_back({mid, p.b});
        stack.push_back({p.a, mid});
    }
    return max_star(std::span<const double>(accepted));
}

}  // namespace spb
