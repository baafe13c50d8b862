#include "spb/sp67_family.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "spb/root_finding.hpp"
#include "spb/special_functions.hpp"

namespace spb {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321215;
constexpr double kLn4 = 2.0 * kLn2;
constexpr double kLn8 = 3.0 * kLn2;
constexpr double kXMin = 0.70710678118654752440 + 1e-6;  // sqrt(2)/2 + margin
constexpr double kXMax = 1e3;
constexpr int kXGridPoints = 200;
constexpr int kScanPoints = 512;
constexpr double kSLo = 1e-6;
constexpr double kSHi = 1.0 - 1e-6;
constexpr double kSClampLo = 1e-9;
constexpr double kSClampHi = 1.0 - 1e-9;
constexpr double kRootTol = 1e-12;

// The rate equation residual: rhs(s) - (R - O1). rhs is the right side of the
// rho_x equation; a downcrossing root selects s_x.
inline double rate_residual(const TiltingEvaluation& te, double x, double n,
                            double rate_minus_o1) {
    const double oms = 1.0 - te.s;
    return -te.mu0 - oms * te.mu0_prime +
           oms * x * std::sqrt(2.0 * te.mu0_double_prime / n) - rate_minus_o1;
}

// Triplet access with a tabulated fast path for quadrature-backed channels;
// the BEC closed forms need no table.
class TripletSource {
  public:
    TripletSource(const SymmetricChannel& ch, const QuadratureSpec& spec) : ch_(&ch), spec_(spec) {
        if (std::holds_alternative<MPskAwgnChannel>(ch)) {
            const double h = (kSHi - kSLo) / (kScanPoints - 1);
            table_.resize(kScanPoints);
            for (int i = 0; i < kScanPoints; ++i) table_[i] = exact(kSLo + i * h);
        }
    }

    TiltingEvaluation exact(double s) const { return mu0_triplet(*ch_, s, spec_); }

    // Cubic Hermite interpolation of the tabulated triplet; exact for the BEC.
    TiltingEvaluation approx(double s) const {
        if (table_.empty()) return exact(s);
        const double h = (kSHi - kSLo) / (kScanPoints - 1);
        const double u = (s - kSLo) / h;
        int j = std::clamp(static_cast<int>(u), 0, kScanPoints - 2);
        const double t = u - j;
        auto interp = [&](double TiltingEvaluation::* field) {
            const double y0 = table_[j].*field, y1 = table_[j + 1].*field;
            const double m0 =
                j > 0 ? (table_[j + 1].*field - table_[j - 1].*field) / 2.0 : (y1 - y0);
            const double m1 = j + 2 < kScanPoints
                                  ? (table_[j + 2].*field - table_[j].*field) / 2.0
                                  : (y1 - y0);
            const double t2 = t * t, t3 = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
                   (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
        };
        TiltingEvaluation te;
        te.s = s;
        te.mu0 = interp(&TiltingEvaluation::mu0);
        te.mu0_prime = interp(&TiltingEvaluation::mu0_prime);
        te.mu0_double_prime = std::max(0.0, interp(&TiltingEvaluation::mu0_double_prime));
        return te;
    }

    const TiltingEvaluation& grid_point(int i) const { return table_[i]; }
    bool has_table() const { return !table_.empty(); }

  private:
    const SymmetricChannel* ch_;
    QuadratureSpec spec_;
    std::vector<TiltingEvaluation> table_;
};

struct SxSolution {
    double s = 0.0;
    TiltingEvaluation te;
    bool clamped = false;  // no interior root; the valid region starts at the clamp edge
};

// Dense sign scan over the s grid for the first point where the residual
// drops to <= 0, then exact bisection (with secant acceleration) on the
// downcrossing bracket. Returns nullopt when the residual stays positive:
// that x contributes nothing (trivial bound).
std::optional<SxSolution> solve_s_for_x(const TripletSource& src, double x, double n,
                                        double rate_minus_o1) {
    const double h = (kSHi - kSLo) / (kScanPoints - 1);
    auto exact_at = [&](double s) {
        const TiltingEvaluation te = src.exact(s);
        return std::pair<double, TiltingEvaluation>(rate_residual(te, x, n, rate_minus_o1), te);
    };
    auto bisect = [&](double lo, double hi, double f_lo, double f_hi,
                      TiltingEvaluation te_hi) {
        for (int it = 0; it < 200 && hi - lo > kRootTol; ++it) {
            double mid;
            const double denom = f_hi - f_lo;
            if (denom != 0.0) {
                mid = lo - f_lo * (hi - lo) / denom;
                const double margin = 0.01 * (hi - lo);
                if (!(mid > lo + margin && mid < hi - margin)) mid = 0.5 * (lo + hi);
            } else {
                mid = 0.5 * (lo + hi);
            }
            auto [r_mid, te_mid] = exact_at(mid);
            if (r_mid <= 0.0) {
                hi = mid;
                f_hi = r_mid;
                te_hi = te_mid;
            } else {
                lo = mid;
                f_lo = r_mid;
            }
        }
        return SxSolution{hi, te_hi, false};
    };

    int first_nonpos = -1;
    for (int i = 0; i < kScanPoints; ++i) {
        const double s = kSLo + i * h;
        const double r = src.has_table() ? rate_residual(src.grid_point(i), x, n, rate_minus_o1)
                                         : rate_residual(src.exact(s), x, n, rate_minus_o1);
        if (r <= 0.0) {
            first_nonpos = i;
            break;
        }
    }

    if (first_nonpos < 0) {
        // the scan stayed positive; look at the upper clamp endpoint
        auto [r_hi, te_hi] = exact_at(kSClampHi);
        if (r_hi > 0.0) return std::nullopt;
        auto [r_lo, te_lo] = exact_at(kSHi);
        if (r_lo <= 0.0) return SxSolution{kSHi, te_lo, false};
        return bisect(kSHi, kSClampHi, r_lo, r_hi, te_hi);
    }
    if (first_nonpos == 0) {
        auto [r_clamp, te_clamp] = exact_at(kSClampLo);
        if (r_clamp <= 0.0) return SxSolution{kSClampLo, te_clamp, true};
        auto [r_edge, te_edge] = exact_at(kSLo);
        if (r_edge <= 0.0) return bisect(kSClampLo, kSLo, r_clamp, r_edge, te_edge);
        // interpolation noise at the edge; fall through with an exact walk
        first_nonpos = -1;
        for (int i = 1; i < kScanPoints; ++i) {
            auto [r_i, te_i] = exact_at(kSLo + i * h);
            if (r_i <= 0.0) {
                first_nonpos = i;
                break;
            }
        }
        if (first_nonpos < 0) return std::nullopt;
    }

    double lo = kSLo + (first_nonpos - 1) * h;
    double hi = kSLo + first_nonpos * h;
    auto [r_lo, te_lo] = exact_at(lo);
    auto [r_hi, te_hi] = exact_at(hi);
    // the table can misplace the crossing by a cell; expand the bracket
    int steps = 0;
    while (r_hi > 0.0 && steps < 8) {
        const int j = first_nonpos + 1 + steps;
        if (j >= kScanPoints) return std::nullopt;
        lo = hi;
        r_lo = r_hi;
        hi = kSLo + j * h;
        std::tie(r_hi, te_hi) = exact_at(hi);
        ++steps;
    }
    steps = 0;
    while (r_lo <= 0.0 && steps < 8) {
        const int j = first_nonpos - 2 - steps;
        if (j < 0) {
            auto [r_clamp, te_clamp] = exact_at(kSClampLo);
            if (r_clamp <= 0.0) return SxSolution{kSClampLo, te_clamp, true};
            hi = lo;
            r_hi = r_lo;
            std::tie(r_lo, te_lo) = exact_at(kSClampLo);
            lo = kSClampLo;
            break;
        }
        hi = lo;
        r_hi = r_lo;
        te_hi = te_lo;
        lo = kSLo + j * h;
        std::tie(r_lo, te_lo) = exact_at(lo);
        ++steps;
    }
    if (r_hi > 0.0) return std::nullopt;
    if (r_lo <= 0.0) return SxSolution{lo, te_lo, true};
    return bisect(lo, hi, r_lo, r_hi, te_hi);
}

struct FamilyConfig {
    bool is_vf = false;
    double o1_const = kLn4;       // ln4 for ISP; ln8 (ln4 pre-correction) for VF
    double o2_const = kLn4;       // ln4 for ISP; ln8 for VF
    double composition_ln = 0.0;  // ln C(N+K-1, K-1), VF only
    bool require_root = false;    // VF: the published form needs the solved rho_x
};

struct XEvaluation {
    bool feasible = false;
    double value = kLnZero;  // ln P_e lower bound contributed by this x
    SxSolution sx;
};

XEvaluation evaluate_x(const TripletSource& src, const FamilyConfig& cfg, double x, double n,
                       double rate_nats, bool exact_phase) {
    XEvaluation ev;
    const double c1 = std::log(2.0 - 1.0 / (x * x));
    const double o1 = (cfg.o1_const + cfg.composition_ln - c1) / n;
    const double target = rate_nats - o1;
    std::optional<SxSolution> sx;
    if (exact_phase || !src.has_table()) {
        sx = solve_s_for_x(src, x, n, target);
    } else {
        // table-only scan and bisection; no quadrature behind it
        const double h = (kSHi - kSLo) / (kScanPoints - 1);
        int first = -1;
        for (int i = 0; i < kScanPoints; ++i) {
            if (rate_residual(src.grid_point(i), x, n, target) <= 0.0) {
                first = i;
                break;
            }
        }
        if (first < 0) return ev;
        if (first == 0) {
            sx = SxSolution{kSLo, src.grid_point(0), true};
        } else {
            double lo = kSLo + (first - 1) * h;
            double hi = kSLo + first * h;
            TiltingEvaluation te_hi = src.grid_point(first);
            for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                const TiltingEvaluation te_mid = src.approx(mid);
                if (rate_residual(te_mid, x, n, target) <= 0.0) {
                    hi = mid;
                    te_hi = te_mid;
                } else {
                    lo = mid;
                }
            }
            sx = SxSolution{hi, te_hi, false};
        }
    }
    if (!sx) return ev;
    if (cfg.require_root && sx->clamped) return ev;
    const TiltingEvaluation& te = sx->te;
    const double s = sx->s;
    if (!cfg.is_vf) {
        // direct form of the averaged two-measure bound evaluated at s_x
        ev.value = std::log(0.5 - 0.25 / (x * x)) + n * (te.mu0 - s * te.mu0_prime) -
                   s * x * std::sqrt(2.0 * n * te.mu0_double_prime);
    } else {
        const double rho = s / (1.0 - s);
        const double e0_val = -te.mu0 / (1.0 - s);
        const double o2 =
            s * x * std::sqrt(8.0 * te.mu0_double_prime / n) + (cfg.o2_const - c1) / n;
        ev.value = -n * (e0_val - rho * target + o2);
    }
    if (!std::isfinite(ev.value)) return ev;
    ev.feasible = true;
    ev.sx = *sx;
    return ev;
}

struct FamilySolution {
    bool feasible = false;
    double x = 0.0;
    double value = kLnZero;
    SxSolution sx;
    bool x_capped = false;
};

// Log-spaced x grid scan (table-backed where available) followed by
// golden-section refinement with exact evaluations in the best cell.
FamilySolution optimize_x(const TripletSource& src, const FamilyConfig& cfg, double n,
                          double rate_nats) {
    const double ln_lo = std::log(kXMin), ln_hi = std::log(kXMax);
    std::vector<double> xs(kXGridPoints);
    for (int i = 0; i < kXGridPoints; ++i) {
        xs[i] = std::exp(ln_lo + (ln_hi - ln_lo) * i / (kXGridPoints - 1));
    }
    int best = -1;
    double best_val = kLnZero;
    for (int i = 0; i < kXGridPoints; ++i) {
        const auto ev = evaluate_x(src, cfg, xs[i], n, rate_nats, false);
        if (ev.feasible && ev.value > best_val) {
            best_val = ev.value;
            best = i;
        }
    }
    FamilySolution sol;
    if (best < 0) return sol;

    double a = xs[std::max(0, best - 1)];
    double b = xs[std::min(kXGridPoints - 1, best + 1)];
    auto g = [&](double x) { return evaluate_x(src, cfg, x, n, rate_nats, true); };
    XEvaluation best_ev = g(xs[best]);
    double best_x = xs[best];
    auto consider = [&](double x, const XEvaluation& ev) {
        if (!ev.feasible) return;
        if (!best_ev.feasible || ev.value > best_ev.value ||
            (ev.value == best_ev.value && x < best_x)) {
            best_ev = ev;
            best_x = x;
        }
    };
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    XEvaluation e1 = g(x1), e2 = g(x2);
    consider(x1, e1);
    consider(x2, e2);
    const double tol = 1e-6 * std::max(1.0, xs[best]);
    for (int it = 0; it < 120 && b - a > tol; ++it) {
        const double v1 = e1.feasible ? e1.value : kLnZero;
        const double v2 = e2.feasible ? e2.value : kLnZero;
        if (v1 >= v2) {
            b = x2;
            x2 = x1;
            e2 = e1;
            x1 = b - inv_phi * (b - a);
            e1 = g(x1);
            consider(x1, e1);
        } else {
            a = x1;
            x1 = x2;
            e1 = e2;
            x2 = a + inv_phi * (b - a);
            e2 = g(x2);
            consider(x2, e2);
        }
    }
    if (!best_ev.feasible) return sol;
    sol.feasible = true;
    sol.x = best_x;
    sol.value = best_ev.value;
    sol.sx = best_ev.sx;
    sol.x_capped = best_x >= 0.98 * kXMax;
    return sol;
}

}  // namespace

void CodeParams::validate() const {
    if (n < 1) throw std::invalid_argument("CodeParams: n >= 1 required");
    if (!(rate_nats > 0.0)) throw std::invalid_argument("CodeParams: rate must be positive");
    if (list_size < 1) throw std::invalid_argument("CodeParams: list_size >= 1 required");
}

CodeParams code_from_rate_bits(std::int64_t n, double rate_bits, std::int64_t list_size) {
    CodeParams code;
    code.n = n;
    code.list_size = list_size;
    code.rate_nats = rate_bits * kLn2 - std::log(static_cast<double>(list_size)) / n;
    code.validate();
    return code;
}

double e_sp_with_argmax(const SymmetricChannel& ch, double rate_nats, double& rho_opt,
                        const QuadratureSpec& spec) {
    if (!(rate_nats > 0.0)) throw std::invalid_argument("e_sp: rate must be positive");
    auto h = [&](double rho) { return e0(ch, rho, spec) - rho * rate_nats; };
    double hi = 1e3;
    ScalarMaximum best;
    for (;;) {
        best = maximize_scalar(h, 0.0, hi, 1e-10 * hi);
        if (best.argmax < 0.95 * hi || hi >= 1e6) break;
        hi *= 10.0;
    }
    if (best.argmax >= 0.95 * hi && h(hi) > h(0.5 * hi) + 1e-12) {
        rho_opt = std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::infinity();
    }
    rho_opt = best.argmax;
    return std::max(0.0, best.max);
}

double e_sp(const SymmetricChannel& ch, double rate_nats, const QuadratureSpec& spec) {
    double rho = 0.0;
    return e_sp_with_argmax(ch, rate_nats, rho, spec);
}

double isp_value_at_x(const SymmetricChannel& ch, const CodeParams& code, double x,
                      const QuadratureSpec& spec) {
    code.validate();
    if (!(x > kXMin - 1e-6)) throw std::invalid_argument("isp_value_at_x: x must exceed sqrt(2)/2");
    TripletSource src(ch, spec);
    FamilyConfig cfg;
    const auto ev = evaluate_x(src, cfg, x, static_cast<double>(code.n), code.rate_nats, true);
    return ev.feasible ? ev.value : kLnZero;
}

IspResult isp_bound(const SymmetricChannel& ch, const CodeParams& code,
                    const QuadratureSpec& spec) {
    code.validate();
    const double n = static_cast<double>(code.n);
    TripletSource src(ch, spec);
    FamilyConfig cfg;
    const auto sol = optimize_x(src, cfg, n, code.rate_nats);
    IspResult res;
    if (!sol.feasible) return res;
    res.status = BoundStatus::ok;
    res.ln_pe_lower = sol.value;
    res.x_opt = sol.x;
    res.s_opt = sol.sx.s;
    res.rho_opt = sol.sx.s / (1.0 - sol.sx.s);
    res.exponent = -sol.value / n;
    const double c1 = std::log(2.0 - 1.0 / (sol.x * sol.x));
    res.o1 = (kLn4 - c1) / n;
    res.o2 =
        sol.sx.s * sol.x * std::sqrt(8.0 * sol.sx.te.mu0_double_prime / n) + (kLn4 - c1) / n;
    res.x_capped = sol.x_capped;
    return res;
}

VfResult vf_bound(const SymmetricChannel& ch, const CodeParams& code, int input_alphabet_size,
                  const QuadratureSpec& spec, bool original_constant) {
    code.validate();
    if (input_alphabet_size < 2 || input_alphabet_size != alphabet_size(ch))
        throw std::invalid_argument("vf_bound: K does not match the channel alphabet");
    const double n = static_cast<double>(code.n);
    const double k = static_cast<double>(input_alphabet_size);
    TripletSource src(ch, spec);
    FamilyConfig cfg;
    cfg.is_vf = true;
    cfg.o1_const = original_constant ? kLn4 : kLn8;
    cfg.o2_const = kLn8;
    cfg.composition_ln = ln_binomial(n + k - 1.0, k - 1.0);
    cfg.require_root = true;
    const auto sol = optimize_x(src, cfg, n, code.rate_nats);
    VfResult res;
    res.composition_penalty = cfg.composition_ln / n;
    if (!sol.feasible) return res;
    res.status = BoundStatus::ok;
    res.ln_pe_lower = sol.value;
    res.x_opt = sol.x;
    res.s_opt = sol.sx.s;
    res.rho_opt = sol.sx.s / (1.0 - sol.sx.s);
    res.exponent = -sol.value / n;
    const double c1 = std::log(2.0 - 1.0 / (sol.x * sol.x));
    res.o1 = (cfg.o1_const + cfg.composition_ln - c1) / n;
    res.o2 =
        sol.sx.s * sol.x * std::sqrt(8.0 * sol.sx.te.mu0_double_prime / n) + (kLn8 - c1) / n;
    res.x_capped = sol.x_capped;
    return res;
}

Sp67Result sp67_classic(const SymmetricChannel& ch, const CodeParams& code,
                        int input_alphabet_size, const QuadratureSpec& spec) {
    code.validate();
    const auto* bec = std::get_if<BecChannel>(&ch);
    if (bec == nullptr)
        throw std::invalid_argument(
            "sp67_classic: requires a finite-output channel (continuous output unsupported)");
    const double p = bec->p();
    Sp67Result res;
    res.p_min = (p <= 0.0 || p >= 1.0) ? 1.0 : std::min(p, 1.0 - p);
    const double n = static_cast<double>(code.n);
    const double k = static_cast<double>(input_alphabet_size);
    const double o1 = kLn8 / n + k * std::log(n) / n;
    const double o2 = std::sqrt(8.0 / n) * (1.0 - 0.5 * std::log(res.p_min)) + kLn8 / n;
    const double shifted_rate = code.rate_nats - o1;
    if (!(shifted_rate > 0.0)) return res;  // exponent diverges; only P_e >= 0 remains
    double rho = 0.0;
    const double exp_sp = e_sp_with_argmax(ch, shifted_rate, rho, spec);
    if (!std::isfinite(exp_sp)) return res;
    res.status = BoundStatus::ok;
    res.rho_opt = rho;
    res.ln_pe_lower = -n * (exp_sp + o2);
    return res;
}

}  // namespace spb
