#pragma once

#include <string>
#include <vector>

#include "spb/sp59.hpp"
#include "spb/sp67_family.hpp"

namespace spb {

enum class BoundKind { isp, vf, sp67, sp59, rcb, clb };

const char* bound_kind_name(BoundKind kind);

// A channel family fixes everything except the operating point: the PSK
// modulation order over the AWGN channel, or the BEC.
struct ChannelFamily {
    bool is_bec = false;
    int m = 2;
};

struct BoundOptions {
    QuadratureSpec quad{};
    bool vf_original = false;
    ConeMode sp59_cone = ConeMode::exact_theta1;
};

enum class EvalStatus { ok, trivial, error };

struct PointEval {
    EvalStatus status = EvalStatus::error;
    double ln_pe = kLnZero;
    std::string message;
};

// Evaluates one bound at one operating point (Eb/N0 in dB for AWGN families,
// erasure probability for the BEC). BoundKind::clb is not a per-point bound
// and is rejected.
PointEval eval_bound_ln(BoundKind kind, const ChannelFamily& family, const CodeParams& code,
                        double operating_point, const BoundOptions& opts = {});

// Gallager's random-coding upper bound: -N max_{0<=rho<=1} [E0(rho) - rho R].
double gallager_rcb(const SymmetricChannel& ch, const CodeParams& code,
                    const QuadratureSpec& spec = {});

// Capacity-limit operating points.
double capacity_limit_ebn0_db(int m, double rate_nats, const QuadratureSpec& spec = {});
double capacity_limit_erasure_p(double rate_nats);

// Smallest Eb/N0 (dB) at which the bound permits P_e <= target; bisection to
// tol_db with the bracket expanded upward from the capacity limit.
double ebn0_crossing(BoundKind kind, const ChannelFamily& family, const CodeParams& code,
                     double target_ln_pe, const BoundOptions& opts = {}, double tol_db = 1e-3);

struct MinLenQuery {
    BoundKind bound_kind = BoundKind::isp;
    ChannelFamily family{};
    double rate_nats = 0.0;
    double target_ln_pe = 0.0;     // must be < 0
    double operating_point = 0.0;  // Eb/N0 dB, or erasure p for the BEC
    std::int64_t n_max = 10000000;
};

struct MinLenResult {
    bool feasible = false;
    std::int64_t n = 0;
    std::string diagnostic;
};

// Smallest N at which the bound permits P_e <= target (for rcb: at which
// random codes provably achieve it). Exponential doubling, integer bisection,
// and a monotonicity verification pass at the final bracket.
MinLenResult min_blocklength(const MinLenQuery& q, const BoundOptions& opts = {});

enum class RegionWinner { sp59, isp_or_vf, clb };

struct RegionCell {
    double rate_bits = 0.0;
    std::int64_t n = 0;
    RegionWinner winner = RegionWinner::clb;
    bool ok = false;
    std::string diagnostic;
    double sp59_db = 0.0;
    double ispvf_db = 0.0;
    double clb_db = 0.0;
};

// Crossing-based dominance map over a (rate, N) grid for AWGN families; the
// winner is the bound demanding the highest Eb/N0 at the target P_e. Ties
// within 1e-3 dB resolve toward sp59, then the SP67-family bound.
std::vector<RegionCell> dominance_region(const std::vector<double>& rate_bits_grid,
                                         const std::vector<std::int64_t>& n_grid,
                                         double target_ln_pe, const ChannelFamily& family,
                                         BoundKind finite_variant = BoundKind::isp,
                                         const BoundOptions& opts = {}, int jobs = 1);

// Smallest N in [n_lo, n_hi] at which the SP67-family variant demands at
// least as much Eb/N0 as SP59 at the target (the N(R) boundary of the maps).
std::int64_t dominance_boundary_n(double rate_bits, double target_ln_pe,
                                  const ChannelFamily& family, BoundKind variant,
                                  std::int64_t n_lo, std::int64_t n_hi,
                                  const BoundOptions& opts = {});

}  // namespace spb
