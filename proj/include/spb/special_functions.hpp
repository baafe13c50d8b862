#pragma once

namespace spb {

// ln Gamma(a) for a > 0, relative error below 1e-13 on (0, 1e7].
double ln_gamma(double a);

// ln C(n, k) through ln Gamma.
double ln_binomial(double n, double k);

// Regularized lower incomplete gamma P(a, y) in the linear domain.
double reg_gamma_lower(double a, double y);

// ln of the regularized upper incomplete gamma Q(a, y), stable for Q near 0.
double ln_reg_gamma_upper(double a, double y);

// ln[1 + (-1)^j * P((j+1)/2, x^2/2)] -- the parity factor of the d(N,j,x)
// exponents. Odd j goes through ln Q directly, never ln(1 - small).
double ln_gamma_parity_factor(long long j, double x);

// ln Q(x) for the standard Gaussian tail, usable far beyond the underflow
// point of erfc (x up to ~1e3 and more).
double ln_q(double x);

}  // namespace spb
