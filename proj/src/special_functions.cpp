#include "spb/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spb/log_value.hpp"

namespace spb {

namespace {

constexpr double kHalfLn2Pi = 0.9189385332046727417803297364;  // ln(2*pi)/2

// Lanczos approximation, g = 7, 9 terms.
const double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

double ln_gamma_lanczos(double a) {
    const double z = a - 1.0;
    double series = kLanczos[0];
    for (int i = 1; i < 9; ++i) series += kLanczos[i] / (z + i);
    const double t = z + 7.5;
    return kHalfLn2Pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

// Series for P(a,y), valid and quickly convergent for y < a + 1.
// Returns ln P.
double ln_reg_lower_series(double a, double y) {
    if (y == 0.0) return kLnZero;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= y / (a + n);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return a * std::log(y) - y - ln_gamma(a) + std::log(sum);
}

// Modified Lentz continued fraction for Q(a,y), y >= a + 1. Returns ln Q.
double ln_reg_upper_cf(double a, double y) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = y + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= 1e-16) break;
    }
    return a * std::log(y) - y - ln_gamma(a) + std::log(h);
}

}  // namespace

double ln_gamma(double a) {
    if (!(a > 0.0)) throw std::domain_error("ln_gamma: requires a > 0");
    if (a < 0.5) return ln_gamma_lanczos(a + 1.0) - std::log(a);
    return ln_gamma_lanczos(a);
}

double ln_binomial(double n, double k) {
    return ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
}

double reg_gamma_lower(double a, double y) {
    if (!(a > 0.0)) throw std::domain_error("reg_gamma_lower: requires a > 0");
    if (y < 0.0) throw std::domain_error("reg_gamma_lower: requires y >= 0");
    if (y == 0.0) return 0.0;
    if (y < a + 1.0) return std::exp(ln_reg_lower_series(a, y));
    return -std::expm1(ln_reg_upper_cf(a, y));
}

double ln_reg_gamma_upper(double a, double y) {
    if (!(a > 0.0)) throw std::domain_error("ln_reg_gamma_upper: requires a > 0");
    if (y < 0.0) throw std::domain_error("ln_reg_gamma_upper: requires y >= 0");
    if (y == 0.0) return 0.0;
    if (y >= a + 1.0) return ln_reg_upper_cf(a, y);
    // Q bounded away from 0 here, so 1 - P is safe.
    return std::log1p(-std::exp(ln_reg_lower_series(a, y)));
}

double ln_gamma_parity_factor(long long j, double x) {
    if (j < 0) throw std::domain_error("ln_gamma_parity_factor: requires j >= 0");
    if (x < 0.0) throw std::domain_error("ln_gamma_parity_factor: requires x >= 0");
    const double a = 0.5 * (static_cast<double>(j) + 1.0);
    const double y = 0.5 * x * x;
    if (j % 2 == 0) return std::log1p(reg_gamma_lower(a, y));
    return ln_reg_gamma_upper(a, y);
}

double ln_q(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x >= 8.0) {
        // Laplace continued fraction for the Mills ratio.
        double t = x;
        for (int k = 80; k >= 1; --k) t = x + k / t;
        return -0.5 * x * x - kHalfLn2Pi - std::log(t);
    }
    if (x <= -8.0) return std::log1p(-std::exp(ln_q(-x)));
    return std::log(0.5 * std::erfc(x / std::sqrt(2.0)));
}

}  // namespace spb
