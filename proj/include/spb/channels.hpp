#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <variant>
#include <vector>

#include "spb/quadrature.hpp"

namespace spb {

// mu0(s, f_s) and its first two partial derivatives in s, taken while the
// tilting measure f_s is held fixed.
struct TiltingEvaluation {
    double s = 0.0;
    double mu0 = 0.0;
    double mu0_prime = 0.0;
    double mu0_double_prime = 0.0;
};

struct TiltDeltas {
    double delta_plus = 0.0;   // mu(s0 + h; f_s0) - mu(s0; f_s0)
    double delta_minus = 0.0;  // mu(s0 - h; f_s0) - mu(s0; f_s0)
};

enum class BecOutput { bit0 = 0, bit1 = 1, erasure = 2 };

class BecChannel {
  public:
    explicit BecChannel(double p);
    double p() const { return p_; }

  private:
    double p_;
};

// M-PSK constellation with unit-energy symbols on the AWGN channel,
// coherently detected; outputs live in R^2. For m == 2 the quadrature
// reduces to one dimension along the axis through the two symbols.
class MPskAwgnChannel {
  public:
    MPskAwgnChannel(int m, double sigma);

    int m() const { return m_; }
    double sigma() const { return sigma_; }
    double es_n0() const { return 1.0 / (2.0 * sigma_ * sigma_); }
    std::array<double, 2> point(int k) const { return points_[k]; }

    struct Node {
        double y0, y1;     // output point
        double ln_quad_w;  // quadrature weight (jacobian and symmetry included)
        double ln_p0;      // ln p(y | x_0)
    };
    struct Grid {
        std::vector<Node> nodes;
        // ips[i*m + k] = <y_i, x_k - x_0> / sigma^2
        std::vector<double> ips;
    };

    std::shared_ptr<const Grid> grid_for_level(int level) const;
    int calibrated_level(const QuadratureSpec& spec) const;

  private:
    std::shared_ptr<const Grid> build_grid(int level) const;
    void fill_ips(Grid& grid) const;

    struct Cache {
        std::mutex mutex;
        std::map<int, std::shared_ptr<const Grid>> grids;
        std::map<unsigned long long, int> calibrated;
    };

    int m_;
    double sigma_;
    std::vector<std::array<double, 2>> points_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

using SymmetricChannel = std::variant<BecChannel, MPskAwgnChannel>;

TiltingEvaluation mu0_triplet(const BecChannel& ch, double s);
TiltingEvaluation mu0_triplet(const MPskAwgnChannel& ch, double s,
                              const QuadratureSpec& spec = {});
TiltingEvaluation mu0_triplet(const SymmetricChannel& ch, double s,
                              const QuadratureSpec& spec = {});

// Gallager E0 with the uniform input distribution. Computed on an
// integration path independent of mu0_triplet.
double e0(const BecChannel& ch, double rho);
double e0(const MPskAwgnChannel& ch, double rho, const QuadratureSpec& spec = {});
double e0(const SymmetricChannel& ch, double rho, const QuadratureSpec& spec = {});

double capacity(const BecChannel& ch);
double capacity(const MPskAwgnChannel& ch, const QuadratureSpec& spec = {});
double capacity(const SymmetricChannel& ch, const QuadratureSpec& spec = {});

double ln_tilting_density(const BecChannel& ch, double s, BecOutput y);
double ln_tilting_density(const MPskAwgnChannel& ch, double s, std::array<double, 2> y,
                          const QuadratureSpec& spec = {});

// Prepared M-PSK tilting density: the normalizer theta(s) is computed once,
// point evaluations are then cheap.
class MpskTiltingDensity {
  public:
    MpskTiltingDensity(const MPskAwgnChannel& ch, double s, const QuadratureSpec& spec = {});
    double ln_at(std::array<double, 2> y) const;
    double theta_ln() const { return theta_ln_; }

  private:
    MPskAwgnChannel ch_;
    double s_;
    double theta_ln_;
};

// Generic evaluation of mu(s; f) with f frozen at the tilting measure of
// s_tilt; this is the direct definition, used as an independent check of the
// closed forms and moment formulas.
double mu0_frozen_tilt(const BecChannel& ch, double s, double s_tilt);
double mu0_frozen_tilt(const MPskAwgnChannel& ch, double s, double s_tilt,
                       const QuadratureSpec& spec = {});

// Finite-difference deltas of mu(.; f_s0) around s0, computed through
// expm1/log1p so that second differences at h ~ 1e-5 remain meaningful.
TiltDeltas mu0_frozen_tilt_deltas(const BecChannel& ch, double s0, double h);
TiltDeltas mu0_frozen_tilt_deltas(const MPskAwgnChannel& ch, double s0, double h,
                                  const QuadratureSpec& spec = {});

int alphabet_size(const SymmetricChannel& ch);

// SNR conversions for unit-energy symbols: Es/N0 = 1/(2 sigma^2),
// Eb/N0 = (Es/N0) / (code rate in information bits per channel use).
inline double sigma_from_esn0(double esn0) { return std::sqrt(1.0 / (2.0 * esn0)); }
inline double esn0_from_ebn0_db(double ebn0_db, double rate_bits_per_use) {
    return std::pow(10.0, ebn0_db / 10.0) * rate_bits_per_use;
}
inline double ebn0_db_from_esn0(double esn0, double rate_bits_per_use) {
    return 10.0 * std::log10(esn0 / rate_bits_per_use);
}

}  // namespace spb
