#include "spb/compare.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "spb/root_finding.hpp"

namespace spb {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321215;

SymmetricChannel make_channel(const ChannelFamily& family, const CodeParams& code,
                              double operating_point) {
    if (family.is_bec) return SymmetricChannel{BecChannel(operating_point)};
    const double rate_bits = code.rate_nats / kLn2;
    const double esn0 = esn0_from_ebn0_db(operating_point, rate_bits);
    return SymmetricChannel{MPskAwgnChannel(family.m, sigma_from_esn0(esn0))};
}

// "permits" predicate: the bound does not exclude P_e <= target at this
// operating point. A trivial converse excludes nothing; an evaluation error
// (e.g. SP59 below its rate floor) excludes the point from the search.
bool bound_permits(const PointEval& ev, double target_ln_pe, bool is_achievability) {
    if (ev.status == EvalStatus::error) return false;
    if (ev.status == EvalStatus::trivial) return !is_achievability;
    return ev.ln_pe <= target_ln_pe;
}

}  // namespace

const char* bound_kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::isp: return "isp";
        case BoundKind::vf: return "vf";
        case BoundKind::sp67: return "sp67";
        case BoundKind::sp59: return "sp59";
        case BoundKind::rcb: return "rcb";
        case BoundKind::clb: return "clb";
    }
    return "?";
}

PointEval eval_bound_ln(BoundKind kind, const ChannelFamily& family, const CodeParams& code,
                        double operating_point, const BoundOptions& opts) {
    PointEval ev;
    try {
        switch (kind) {
            case BoundKind::isp: {
                const auto ch = make_channel(family, code, operating_point);
                const auto r = isp_bound(ch, code, opts.quad);
                ev.status = r.status == BoundStatus::ok ? EvalStatus::ok : EvalStatus::trivial;
                ev.ln_pe = r.ln_pe_lower;
                break;
            }
            case BoundKind::vf: {
                const auto ch = make_channel(family, code, operating_point);
                const auto r =
                    vf_bound(ch, code, alphabet_size(ch), opts.quad, opts.vf_original);
                ev.status = r.status == BoundStatus::ok ? EvalStatus::ok : EvalStatus::trivial;
                ev.ln_pe = r.ln_pe_lower;
                break;
            }
            case BoundKind::sp67: {
                const auto ch = make_channel(family, code, operating_point);
                const auto r = sp67_classic(ch, code, alphabet_size(ch), opts.quad);
                ev.status = r.status == BoundStatus::ok ? EvalStatus::ok : EvalStatus::trivial;
                ev.ln_pe = r.ln_pe_lower;
                break;
            }
            case BoundKind::sp59: {
                if (family.is_bec)
                    throw std::invalid_argument("sp59 needs a Euclidean signal space (AWGN)");
                const double rate_bits = code.rate_nats / kLn2;
                const double sigma =
                    sigma_from_esn0(esn0_from_ebn0_db(operating_point, rate_bits));
                const auto params = sp59_params_for_psk(family.m, sigma, code);
                try {
                    const auto r = sp59_bound(params, opts.sp59_cone, opts.quad);
                    ev.status = EvalStatus::ok;
                    ev.ln_pe = r.ln_pe_lower;
                } catch (const std::invalid_argument& e) {
                    // per-instance failure (e.g. a one-dimensional signal space)
                    ev.status = EvalStatus::error;
                    ev.message = e.what();
                }
                break;
            }
            case BoundKind::rcb: {
                const auto ch = make_channel(family, code, operating_point);
                ev.status = EvalStatus::ok;
                ev.ln_pe = gallager_rcb(ch, code, opts.quad);
                break;
            }
            case BoundKind::clb:
                throw std::invalid_argument("clb is a threshold, not a per-point bound");
        }
    } catch (const RateTooLowError& e) {
        ev.status = EvalStatus::error;
        ev.message = e.what();
    } catch (const NumericalError& e) {
        ev.status = EvalStatus::error;
        ev.message = e.what();
    }
    return ev;
}

double gallager_rcb(const SymmetricChannel& ch, const CodeParams& code,
                    const QuadratureSpec& spec) {
    code.validate();
    auto h = [&](double rho) { return e0(ch, rho, spec) - rho * code.rate_nats; };
    const auto best = maximize_scalar(h, 0.0, 1.0, 1e-12);
    return -static_cast<double>(code.n) * std::max(0.0, best.max);
}

double capacity_limit_ebn0_db(int m, double rate_nats, const QuadratureSpec& spec) {
    if (!(rate_nats > 0.0)) throw std::domain_error("capacity_limit: rate must be positive");
    if (!(rate_nats < std::log(static_cast<double>(m))))
        throw std::domain_error("capacity_limit: rate exceeds the input alphabet entropy");
    // capacity is monotone decreasing in sigma
    double lo = 0.02, hi = 1.0;
    while (capacity(MPskAwgnChannel(m, hi), spec) > rate_nats) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4) throw NumericalError("capacity_limit: sigma bracket blew up", 0, 0);
    }
    while (capacity(MPskAwgnChannel(m, lo), spec) < rate_nats) {
        lo *= 0.5;
        if (lo < 2e-3)
            throw std::domain_error("capacity_limit: rate too close to the alphabet entropy");
    }
    for (int it = 0; it < 100 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (capacity(MPskAwgnChannel(m, mid), spec) > rate_nats ? lo : hi) = mid;
    }
    const double sigma = 0.5 * (lo + hi);
    return ebn0_db_from_esn0(1.0 / (2.0 * sigma * sigma), rate_nats / kLn2);
}

double capacity_limit_erasure_p(double rate_nats) {
    if (!(rate_nats > 0.0)) throw std::domain_error("capacity_limit: rate must be positive");
    if (!(rate_nats < kLn2))
        throw std::domain_error("capacity_limit: rate exceeds the binary alphabet entropy");
    return 1.0 - rate_nats / kLn2;
}

double ebn0_crossing(BoundKind kind, const ChannelFamily& family, const CodeParams& code,
                     double target_ln_pe, const BoundOptions& opts, double tol_db) {
    if (family.is_bec)
        throw std::invalid_argument("ebn0_crossing: AWGN families only");
    if (!(target_ln_pe < 0.0))
        throw std::invalid_argument("ebn0_crossing: target must be below 1");
    const bool achievability = kind == BoundKind::rcb;
    auto permits = [&](double db) {
        return bound_permits(eval_bound_ln(kind, family, code, db, opts), target_ln_pe,
                             achievability);
    };
    const double clb = capacity_limit_ebn0_db(family.m, code.rate_nats, opts.quad);
    double lo = clb;
    int guard = 0;
    while (permits(lo)) {
        lo -= 2.0;
        if (++guard > 10)
            throw NumericalError("ebn0_crossing: no non-permitting operating point found", 0, 0);
    }
    double hi = lo + 1.0;
    guard = 0;
    while (!permits(hi)) {
        lo = hi;
        hi += std::min(8.0, std::pow(2.0, guard));
        if (++guard > 16)
            throw NumericalError("ebn0_crossing: bound never reaches the target", 0, 0);
    }
    while (hi - lo > tol_db) {
        const double mid = 0.5 * (lo + hi);
        (permits(mid) ? hi : lo) = mid;
    }
    return hi;
}

MinLenResult min_blocklength(const MinLenQuery& q, const BoundOptions& opts) {
    if (!(q.target_ln_pe < 0.0))
        throw std::invalid_argument("min_blocklength: target must be below 1");
    if (!(q.rate_nats > 0.0))
        throw std::invalid_argument("min_blocklength: rate must be positive");
    const bool achievability = q.bound_kind == BoundKind::rcb;
    // A converse excludes N when its value sits above the target; trivial or
    // non-evaluable points exclude nothing. The answer is the first N after
    // the last excluded one. For rcb, "excluded" means not provably achieved.
    auto excluded = [&](std::int64_t n) {
        const auto ev =
            eval_bound_ln(q.bound_kind, q.family, CodeParams{n, q.rate_nats, 1},
                          q.operating_point, opts);
        return !bound_permits(ev, q.target_ln_pe, achievability);
    };
    MinLenResult res;
    // find any excluded length by doubling
    std::int64_t probe = 1;
    std::int64_t first_excluded = -1;
    while (probe <= q.n_max) {
        if (excluded(probe)) {
            first_excluded = probe;
            break;
        }
        probe *= 2;
    }
    if (first_excluded < 0) {
        res.feasible = true;
        res.n = 1;  // nothing excluded anywhere: the requirement is vacuous
        return res;
    }
    // grow past the exclusion region
    std::int64_t lo = first_excluded;  // known excluded
    std::int64_t hi = first_excluded * 2;
    while (excluded(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > q.n_max) {
            res.diagnostic = "no feasible block length up to n_max";
            return res;
        }
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (excluded(mid) ? lo : hi) = mid;
    }
    // monotonicity verification at the bracket edges; a locally non-monotone
    // bound falls back to a bounded linear scan upward
    if (excluded(hi)) {
        while (hi <= q.n_max && excluded(hi)) ++hi;
        if (hi > q.n_max) {
            res.diagnostic = "no feasible block length up to n_max";
            return res;
        }
    }
    res.feasible = true;
    res.n = hi;
    return res;
}

std::vector<RegionCell> dominance_region(const std::vector<double>& rate_bits_grid,
                                         const std::vector<std::int64_t>& n_grid,
                                         double target_ln_pe, const ChannelFamily& family,
                                         BoundKind finite_variant, const BoundOptions& opts,
                                         int jobs) {
    if (rate_bits_grid.empty() || n_grid.empty())
        throw std::invalid_argument("dominance_region: grids must be non-empty");
    if (family.is_bec) throw std::invalid_argument("dominance_region: AWGN families only");
    std::vector<RegionCell> cells(rate_bits_grid.size() * n_grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            const double rate_bits = rate_bits_grid[idx / n_grid.size()];
            const std::int64_t n = n_grid[idx % n_grid.size()];
            RegionCell& cell = cells[idx];
            cell.rate_bits = rate_bits;
            cell.n = n;
            try {
                const auto code = code_from_rate_bits(n, rate_bits);
                cell.clb_db = capacity_limit_ebn0_db(family.m, code.rate_nats, opts.quad);
                cell.sp59_db =
                    ebn0_crossing(BoundKind::sp59, family, code, target_ln_pe, opts);
                cell.ispvf_db =
                    ebn0_crossing(finite_variant, family, code, target_ln_pe, opts);
                // highest required Eb/N0 wins; ties toward sp59, then isp/vf
                const double tie = 1e-3;
                if (cell.sp59_db + tie >= cell.ispvf_db && cell.sp59_db + tie >= cell.clb_db) {
                    cell.winner = RegionWinner::sp59;
                } else if (cell.ispvf_db + tie >= cell.clb_db) {
                    cell.winner = RegionWinner::isp_or_vf;
                } else {
                    cell.winner = RegionWinner::clb;
                }
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.diagnostic = e.what();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return cells;
}

std::int64_t dominance_boundary_n(double rate_bits, double target_ln_pe,
                                  const ChannelFamily& family, BoundKind variant,
                                  std::int64_t n_lo, std::int64_t n_hi,
                                  const BoundOptions& opts) {
    auto beats = [&](std::int64_t n) {
        const auto code = code_from_rate_bits(n, rate_bits);
        const double sp59 = ebn0_crossing(BoundKind::sp59, family, code, target_ln_pe, opts);
        const double other = ebn0_crossing(variant, family, code, target_ln_pe, opts);
        return other >= sp59;
    };
    if (beats(n_lo)) return n_lo;
    if (!beats(n_hi))
        throw NumericalError("dominance_boundary_n: variant never beats sp59 on the range", 0, 0);
    while (n_hi - n_lo > 1) {
        const std::int64_t mid = n_lo + (n_hi - n_lo) / 2;
        (beats(mid) ? n_hi : n_lo) = mid;
    }
    return n_hi;
}

}  // namespace spb
