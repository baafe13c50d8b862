#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spb/quadrature.hpp"
#include "spb/sp67_family.hpp"

namespace spb {

struct Sp59Params {
    std::int64_t n_dims = 0;           // real signal-space dimensions
    double rate_nats_per_dim = 0.0;
    double a = 0.0;                    // A = sqrt(2 Es / N0) per dimension

    void validate() const;
};

// Maps an M-PSK code to the equal-energy signal space: BPSK occupies one real
// dimension per channel use, larger constellations two, with the symbol
// energy split across them. This reproduces the coincidence of the BPSK and
// QPSK region maps.
Sp59Params sp59_params_for_psk(int m, double sigma, const CodeParams& code);

class RateTooLowError : public std::domain_error {
  public:
    explicit RateTooLowError(const std::string& what) : std::domain_error(what) {}
};

enum class ConeMode { exact_theta1, shannon_theta_star };

struct ConeSolution {
    double theta = 0.0;
    ConeMode mode = ConeMode::exact_theta1;
    double ln_solid_angle_ratio = 0.0;  // exact ln[Omega_N(theta)/Omega_N(pi)]
};

struct SolidAngleBounds {
    double lower = 0.0;  // closed-form lower bound (ln), -inf when vacuous
    double exact = 0.0;
    double upper = 0.0;
};

SolidAngleBounds ln_solid_angle_ratio(std::int64_t n, double theta,
                                      const QuadratureSpec& spec = {});

ConeSolution solve_cone_angle(std::int64_t n, double rate_nats_per_dim, ConeMode mode,
                              const QuadratureSpec& spec = {});

// ln f_N(x) as the max* combination of the N exponents d(N, j, x); O(N) per
// call. x = 0 keeps only the j = N-1 term (the 0 * ln 0 convention).
double ln_f_n(std::int64_t n, double x);

// One exponent d(N, j, x), computed through the standalone parity factor
// rather than the ladder recurrences inside ln_f_n.
double sp59_d_term(std::int64_t n, std::int64_t j, double x);

// Workspace carrying the half-integer ln-Gamma table so that repeated
// evaluations at the same N (the angular quadrature) cost O(N) lookups.
class FnWorkspace {
  public:
    explicit FnWorkspace(std::int64_t n);
    std::int64_t n() const { return n_; }
    double ln_f(double x) const;

  private:
    std::int64_t n_;
    std::vector<double> half_ln_gamma_;  // [k] = lnGamma(k / 2)
};

// Value recursion of the P_N / Q_N polynomials, linear domain. Serves as a
// cross-validation oracle; refuses n > 200 where double precision is known
// to corrupt the recursion.
double f_n_recursive(std::int64_t n, double x);

enum class Sp59Method { exact_log_domain, asymptotic_lower, shannon_approx };

struct Sp59Result {
    double ln_pe_lower = kLnZero;
    ConeSolution cone;
    Sp59Method method = Sp59Method::exact_log_domain;
};

Sp59Result sp59_bound(const Sp59Params& params, ConeMode mode = ConeMode::exact_theta1,
                      const QuadratureSpec& spec = {});

enum class Sp59AsymptoticMode { lower, approx };

double sp59_asymptotic(std::int64_t n, double theta, double a, Sp59AsymptoticMode mode);

}  // namespace spb
