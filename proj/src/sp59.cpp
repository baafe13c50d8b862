#include "spb/sp59.hpp"

#include <cmath>

#include "spb/log_value.hpp"
#include "spb/root_finding.hpp"
#include "spb/special_functions.hpp"

namespace spb {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321215;
constexpr double kHalfLnPi = 0.5723649429247000870717137;
constexpr double kHalfLn2Pi = 0.9189385332046727417803297;

// ln of the closed-form solid-angle bounding expression, without the
// (1 - tan^2/n) deflation factor of its lower branch.
double ln_ratio_closed_form(std::int64_t n, double theta) {
    return ln_gamma(0.5 * n) - ln_gamma(0.5 * (n + 1.0)) - kLn2 - kHalfLnPi +
           (n - 1.0) * std::log(std::sin(theta)) - std::log(std::cos(theta));
}

void check_cone_domain(std::int64_t n, double theta) {
    if (n < 2) throw std::domain_error("solid angle: requires n >= 2");
    if (!(theta > 0.0 && theta < M_PI / 2.0))
        throw std::domain_error("solid angle: requires theta in (0, pi/2)");
}

}  // namespace

void Sp59Params::validate() const {
    if (n_dims < 2) throw std::invalid_argument("Sp59Params: n_dims >= 2 required");
    if (!(rate_nats_per_dim > 0.0))
        throw std::invalid_argument("Sp59Params: rate must be positive");
    if (!(a > 0.0)) throw std::invalid_argument("Sp59Params: A must be positive");
}

Sp59Params sp59_params_for_psk(int m, double sigma, const CodeParams& code) {
    code.validate();
    if (m < 2) throw std::invalid_argument("sp59_params_for_psk: m >= 2 required");
    const int dims_per_use = m == 2 ? 1 : 2;
    Sp59Params p;
    p.n_dims = code.n * dims_per_use;
    p.rate_nats_per_dim = code.rate_nats / dims_per_use;
    const double es_per_dim = 1.0 / dims_per_use;  // unit-energy symbols
    p.a = std::sqrt(es_per_dim) / sigma;           // sqrt(2 Es_dim / N0), N0 = 2 sigma^2
    return p;
}

SolidAngleBounds ln_solid_angle_ratio(std::int64_t n, double theta, const QuadratureSpec& spec) {
    check_cone_domain(n, theta);
    SolidAngleBounds b;
    const double nn = static_cast<double>(n);
    const double ln_int = integrate_ln(
        [nn](double phi) {
            return phi <= 0.0 ? kLnZero : (nn - 2.0) * std::log(std::sin(phi));
        },
        0.0, theta, spec);
    b.exact = ln_gamma(0.5 * nn) - ln_gamma(0.5 * (nn - 1.0)) - kHalfLnPi + ln_int;
    b.upper = ln_ratio_closed_form(n, theta);
    const double t = std::tan(theta);
    const double one_minus = 1.0 - t * t / nn;
    b.lower = one_minus > 0.0 ? b.upper + std::log(one_minus) : kLnZero;
    return b;
}

ConeSolution solve_cone_angle(std::int64_t n, double rate_nats_per_dim, ConeMode mode,
                              const QuadratureSpec& spec) {
    if (n < 2) throw std::domain_error("solve_cone_angle: requires n >= 2");
    const double nr = n * rate_nats_per_dim;
    if (!(nr > kLn2))
        throw RateTooLowError(
            "solve_cone_angle: exp(-NR) >= 1/2, the half angle would reach pi/2 where the "
            "solid-angle ratio is exactly 1/2");
    ConeSolution sol;
    sol.mode = mode;
    const double eps = 1e-12;
    if (mode == ConeMode::exact_theta1) {
        auto g = [&](double theta) {
            return ln_solid_angle_ratio(n, theta, spec).exact + nr;
        };
        double lo = eps, hi = M_PI / 2.0 - eps;
        // g rises from -inf to ln(1/2) + NR > 0
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) < 0.0 ? lo : hi) = mid;
        }
        sol.theta = 0.5 * (lo + hi);
    } else {
        auto f = [&](double theta) {
            const double t = std::tan(theta);
            const double one_minus = 1.0 - t * t / n;
            if (one_minus <= 0.0) return -1e300;
            return ln_ratio_closed_form(n, theta) + std::log(one_minus) + nr;
        };
        const double theta_cap =
            std::min(M_PI / 2.0 - eps, std::atan(std::sqrt(static_cast<double>(n))) - eps);
        const auto peak = maximize_scalar(f, eps, theta_cap, 1e-13);
        if (!(f(peak.argmax) >= 0.0))
            throw RateTooLowError(
                "solve_cone_angle: the closed-form ratio lower bound never reaches exp(-NR); rate too "
                "low for theta*");
        double lo = eps, hi = peak.argmax;
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        sol.theta = 0.5 * (lo + hi);
    }
    sol.ln_solid_angle_ratio = ln_solid_angle_ratio(n, sol.theta, spec).exact;
    return sol;
}

FnWorkspace::FnWorkspace(std::int64_t n) : n_(n) {
    if (n < 1) throw std::domain_error("FnWorkspace: requires n >= 1");
    half_ln_gamma_.resize(2 * n + 5);
    half_ln_gamma_[0] = 0.0;  // unused
    for (std::size_t k = 1; k < half_ln_gamma_.size(); ++k) {
        half_ln_gamma_[k] = ln_gamma(0.5 * static_cast<double>(k));
    }
}

double FnWorkspace::ln_f(double x) const {
    if (x < 0.0) throw std::domain_error("ln_f_n: requires x >= 0");
    const std::int64_t n = n_;
    const auto lg = [&](std::int64_t twice) { return half_ln_gamma_[twice]; };
    if (x == 0.0) {
        // only j = n-1 survives; its vanished power carries the 0*ln0 = 0 convention
        return lg(n) - lg(n + 1) - 0.5 * kLn2;
    }
    const double y = 0.5 * x * x;
    const double ln_y = std::log(y);
    const double ln_sqrt2_x = 0.5 * kLn2 + std::log(x);
    const double base = y + lg(n) - 0.5 * kLn2;

    // Regularized upper incomplete gamma along the two half-integer ladders,
    // advanced in the log domain: Q(a+1, y) = Q(a, y) + y^a e^-y / Gamma(a+1).
    double lnq_even = kLn2 + ln_q(x);  // Q(1/2, y) = erfc(x / sqrt 2)
    double lnq_odd = -y;               // Q(1, y)
    double acc = kLnZero;
    for (std::int64_t j = 0; j < n; ++j) {
        const bool even = (j % 2) == 0;
        // even j: ln(1 + P(a, y)) = ln(2 - Q(a, y)); odd j: ln Q(a, y)
        const double parity =
            even ? kLn2 + std::log1p(-0.5 * std::exp(lnq_even)) : lnq_odd;
        const double d =
            base - lg(j + 2) - lg(2 * (n - j)) + (n - 1.0 - j) * ln_sqrt2_x + parity;
        if (is_ln_zero(acc)) {
            acc = d;
        } else if (d > acc) {
            const double diff = acc - d;
            acc = diff >= -50.0 ? d + std::log1p(std::exp(diff)) : d;
        } else if (d - acc >= -50.0) {
            acc += std::log1p(std::exp(d - acc));
        }
        // advance the ladder just consumed to a + 1
        const double a = 0.5 * (j + 1.0);
        const double ln_t = a * ln_y - y - lg(j + 3);
        if (even) {
            lnq_even = max_star(lnq_even, ln_t);
        } else {
            lnq_odd = max_star(lnq_odd, ln_t);
        }
    }
    return acc;
}

double ln_f_n(std::int64_t n, double x) { return FnWorkspace(n).ln_f(x); }

double sp59_d_term(std::int64_t n, std::int64_t j, double x) {
    if (n < 1 || j < 0 || j >= n) throw std::domain_error("sp59_d_term: requires 0 <= j < n");
    if (x < 0.0) throw std::domain_error("sp59_d_term: requires x >= 0");
    if (x == 0.0) {
        if (j != n - 1) return kLnZero;
        return ln_gamma(0.5 * n) - ln_gamma(0.5 * (n + 1.0)) - 0.5 * kLn2;
    }
    return 0.5 * x * x + ln_gamma(0.5 * n) - ln_gamma(0.5 * j + 1.0) -
           ln_gamma(static_cast<double>(n - j)) + (n - 1.0 - j) * (0.5 * kLn2 + std::log(x)) -
           0.5 * kLn2 + ln_gamma_parity_factor(j, x);
}

double f_n_recursive(std::int64_t n, double x) {
    if (n < 1) throw std::domain_error("f_n_recursive: requires n >= 1");
    if (n > 200)
        throw std::domain_error(
            "f_n_recursive: refused for n > 200 (the double-precision recursion is documented "
            "to corrupt there); use ln_f_n");
    const double sq2pi = std::sqrt(2.0 / M_PI);
    const double p_init[4] = {0.0, sq2pi, 0.5 * x, sq2pi * (2.0 + x * x) / 3.0};
    const double q_init[4] = {1.0, sq2pi * x, 0.5 * (1.0 + x * x),
                              sq2pi * (3.0 * x + x * x * x) / 3.0};
    double p, q;
    if (n <= 4) {
        p = p_init[n - 1];
        q = q_init[n - 1];
    } else {
        const bool odd = (n % 2) == 1;
        double p2 = p_init[odd ? 0 : 1], p1 = p_init[odd ? 2 : 3];
        double q2 = q_init[odd ? 0 : 1], q1 = q_init[odd ? 2 : 3];
        for (std::int64_t k = odd ? 5 : 6; k <= n; k += 2) {
            const double c1 = (2.0 * k - 5.0 + x * x) / (k - 1.0);
            const double c2 = (k - 4.0) / (k - 1.0);
            const double pn = c1 * p1 - c2 * p2;
            const double qn = c1 * q1 - c2 * q2;
            p2 = p1;
            p1 = pn;
            q2 = q1;
            q1 = qn;
        }
        p = p1;
        q = q1;
    }
    const double phi = 0.5 * std::erfc(-x / std::sqrt(2.0));
    return p + q * std::exp(0.5 * x * x) * std::sqrt(2.0 * M_PI) * phi;
}

Sp59Result sp59_bound(const Sp59Params& params, ConeMode mode, const QuadratureSpec& spec) {
    params.validate();
    Sp59Result res;
    res.cone = solve_cone_angle(params.n_dims, params.rate_nats_per_dim, mode, spec);
    const double n = static_cast<double>(params.n_dims);
    const double a = params.a;
    const double sqrt_n_a = std::sqrt(n) * a;
    const FnWorkspace ws(params.n_dims);
    const double prefix = std::log(n - 1.0) - 0.5 * n * a * a - kHalfLn2Pi;
    auto integrand = [&](double phi) {
        const double x = sqrt_n_a * std::cos(phi);
        return prefix + (n - 2.0) * std::log(std::sin(phi)) + ws.ln_f(x < 0.0 ? 0.0 : x);
    };
    const double ln_int = integrate_ln(integrand, res.cone.theta, M_PI / 2.0, spec);
    res.ln_pe_lower = max_star(ln_int, ln_q(sqrt_n_a));
    res.method = Sp59Method::exact_log_domain;
    return res;
}

double sp59_asymptotic(std::int64_t n, double theta, double a, Sp59AsymptoticMode mode) {
    check_cone_domain(n, theta);
    if (!(a > 0.0)) throw std::domain_error("sp59_asymptotic: requires A > 0");
    const double ct = std::cos(theta), st = std::sin(theta);
    const double g = 0.5 * (a * ct + std::sqrt(a * a * ct * ct + 4.0));
    const double el = 0.5 * (a * a - a * g * ct - 2.0 * std::log(g * st));
    const double nn = static_cast<double>(n);
    if (mode == Sp59AsymptoticMode::lower) {
        return std::log(std::sqrt(nn - 1.0) / (6.0 * nn * (a + 1.0))) -
               0.5 * ((a + 1.0) * (a + 1.0) + 3.0) - nn * el;
    }
    if (!(theta > std::atan(1.0 / a)))
        throw std::domain_error("sp59_asymptotic: approx mode requires theta > acot(A)");
    const double denom = a * g * st * st - ct;
    return -std::log(std::sqrt(M_PI * (1.0 + g * g)) * st * denom) - nn * el -
           0.5 * std::log(nn);
}

}  // namespace spb
