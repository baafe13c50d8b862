#pragma once

#include <cstdint>

#include "spb/channels.hpp"

namespace spb {

struct CodeParams {
    std::int64_t n = 0;        // block length in channel uses
    double rate_nats = 0.0;    // R = ln(M/L) / N
    std::int64_t list_size = 1;

    void validate() const;
};

// R in information bits per channel use for a code with M = 2^(n*rate_bits)
// codewords and list size L.
CodeParams code_from_rate_bits(std::int64_t n, double rate_bits, std::int64_t list_size = 1);

enum class BoundStatus { ok, trivial };

struct IspResult {
    BoundStatus status = BoundStatus::trivial;
    double ln_pe_lower = kLnZero;
    double x_opt = 0.0;
    double s_opt = 0.0;
    double rho_opt = 0.0;
    double exponent = 0.0;  // -ln_pe_lower / n
    double o1 = 0.0;
    double o2 = 0.0;
    bool x_capped = false;
};

struct VfResult {
    BoundStatus status = BoundStatus::trivial;
    double ln_pe_lower = kLnZero;
    double x_opt = 0.0;
    double s_opt = 0.0;
    double rho_opt = 0.0;
    double exponent = 0.0;
    double composition_penalty = 0.0;  // ln C(N+K-1, K-1) / N
    double o1 = 0.0;
    double o2 = 0.0;
    bool x_capped = false;
};

struct Sp67Result {
    BoundStatus status = BoundStatus::trivial;
    double ln_pe_lower = kLnZero;
    double p_min = 0.0;
    double rho_opt = 0.0;
};

// Sphere-packing exponent E_sp(R) = sup_{rho >= 0} [E0(rho) - rho R].
// Returns +inf when the supremum diverges (R below the R_inf of the channel);
// 0 when R is at or above capacity.
double e_sp(const SymmetricChannel& ch, double rate_nats, const QuadratureSpec& spec = {});
double e_sp_with_argmax(const SymmetricChannel& ch, double rate_nats, double& rho_opt,
                        const QuadratureSpec& spec = {});

IspResult isp_bound(const SymmetricChannel& ch, const CodeParams& code,
                    const QuadratureSpec& spec = {});

// ln P_e lower bound contributed by one fixed x (ln-zero sentinel when the
// rate equation has no solution there). Diagnostic surface behind isp_bound's
// optimizer; also drives the exhaustive x-grid property checks.
double isp_value_at_x(const SymmetricChannel& ch, const CodeParams& code, double x,
                      const QuadratureSpec& spec = {});

VfResult vf_bound(const SymmetricChannel& ch, const CodeParams& code, int input_alphabet_size,
                  const QuadratureSpec& spec = {}, bool original_constant = false);

Sp67Result sp67_classic(const SymmetricChannel& ch, const CodeParams& code,
                        int input_alphabet_size, const QuadratureSpec& spec = {});

}  // namespace spb
