#include <cmath>

#include "doctest.h"
#include "spb/compare.hpp"

using namespace spb;

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

TEST_CASE("gallager rcb values") {
    const SymmetricChannel bec{BecChannel(0.5)};
    // vacuous at and above capacity
    CHECK(gallager_rcb(bec, CodeParams{1000, capacity(bec) * 1.05, 1}) == 0.0);
    // fine rho-grid oracle at R = 0.3 ln2
    const auto code = code_from_rate_bits(1000, 0.3);
    double best = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double rho = static_cast<double>(i) / 200000;
        const double h =
            rho * kLn2 - std::log(0.5 + std::pow(2.0, rho) * 0.5) - rho * code.rate_nats;
        best = std::max(best, h);
    }
    CHECK(gallager_rcb(bec, code) == doctest::Approx(-1000.0 * best).epsilon(1e-9));
}

TEST_CASE("isp never exceeds the random-coding upper bound") {
    for (double p : {0.25, 0.45, 0.65}) {
        for (double frac : {0.4, 0.6}) {
            for (std::int64_t n : {300, 2000, 20000, 120000, 900000}) {
                const SymmetricChannel ch{BecChannel(p)};
                const auto code = code_from_rate_bits(n, frac * (1.0 - p));
                const auto isp = isp_bound(ch, code);
                const double ub = gallager_rcb(ch, code);
                if (isp.status == BoundStatus::ok) {
                    CHECK(isp.ln_pe_lower <= ub + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("capacity limit operating points") {
    CHECK(capacity_limit_erasure_p(0.75 * kLn2) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(capacity_limit_erasure_p(1.5 * kLn2), std::domain_error);
    // literature anchor: rate-1/2 BPSK threshold at about 0.19 dB
    CHECK(capacity_limit_ebn0_db(2, 0.5 * kLn2) == doctest::Approx(0.19).epsilon(0.15));
    CHECK(std::fabs(capacity_limit_ebn0_db(2, 0.5 * kLn2) - 0.187) < 0.02);
    CHECK_THROWS_AS(capacity_limit_ebn0_db(2, 1.2 * kLn2), std::domain_error);
}

TEST_CASE("eval_bound_ln status mapping") {
    ChannelFamily bec;
    bec.is_bec = true;
    const auto code = code_from_rate_bits(1000, 0.3);
    const auto ok = eval_bound_ln(BoundKind::isp, bec, code, 0.5);
    CHECK(ok.status == EvalStatus::ok);
    CHECK(ok.ln_pe < 0.0);
    // sp59 on the BEC is a usage error, not a numerical one
    CHECK_THROWS_AS(eval_bound_ln(BoundKind::sp59, bec, code, 0.5), std::invalid_argument);
    // sp59 below its rate floor reports an error, not a number
    ChannelFamily bpsk;
    const auto floor =
        eval_bound_ln(BoundKind::sp59, bpsk, code_from_rate_bits(1, 0.5), 3.0);
    CHECK(floor.status == EvalStatus::error);
}

TEST_CASE("ebn0 crossing: sane value, deterministic, ordered") {
    ChannelFamily bpsk;
    const auto code = code_from_rate_bits(500, 0.8);
    const double target = std::log(1e-5);
    const double isp_db = ebn0_crossing(BoundKind::isp, bpsk, code, target);
    CHECK(isp_db > 1.5);
    CHECK(isp_db < 5.0);
    CHECK(isp_db == ebn0_crossing(BoundKind::isp, bpsk, code, target));
    // the random-coding achievability crossing sits above the converse
    const double rcb_db = ebn0_crossing(BoundKind::rcb, bpsk, code, target);
    CHECK(rcb_db >= isp_db - 1e-3);
    // and everything sits above the capacity limit
    const double clb_db = capacity_limit_ebn0_db(2, code.rate_nats);
    CHECK(isp_db > clb_db);
}

TEST_CASE("min blocklength: consistency with a direct sweep") {
    MinLenQuery q;
    q.bound_kind = BoundKind::isp;
    q.family.is_bec = true;
    q.rate_nats = 0.75 * kLn2;
    q.target_ln_pe = std::log(1e-5);
    q.operating_point = 0.2;
    const auto res = min_blocklength(q);
    REQUIRE(res.feasible);
    CHECK(res.n >= 2);
    auto excludes = [&](std::int64_t n) {
        const auto ev =
            eval_bound_ln(BoundKind::isp, q.family, CodeParams{n, q.rate_nats, 1}, 0.2);
        return ev.status == EvalStatus::ok && ev.ln_pe > q.target_ln_pe;
    };
    CHECK_FALSE(excludes(res.n));
    CHECK(excludes(res.n - 1));
    // exhaustive scan over a window below the answer
    for (std::int64_t n = std::max<std::int64_t>(2, res.n - 40); n < res.n; ++n) {
        CHECK(excludes(n));
    }
}

TEST_CASE("min blocklength: loose targets collapse to 1") {
    MinLenQuery q;
    q.bound_kind = BoundKind::isp;
    q.family.is_bec = true;
    q.rate_nats = 0.5 * kLn2;
    q.target_ln_pe = std::log(0.9);
    q.operating_point = 0.1;
    const auto res = min_blocklength(q);
    REQUIRE(res.feasible);
    CHECK(res.n == 1);
}

TEST_CASE("min blocklength: rcb needs at least what the converse permits") {
    MinLenQuery q;
    q.family.is_bec = true;
    q.rate_nats = 0.7 * kLn2;
    q.target_ln_pe = std::log(1e-4);
    q.operating_point = 0.15;
    q.bound_kind = BoundKind::isp;
    const auto conv = min_blocklength(q);
    q.bound_kind = BoundKind::rcb;
    const auto achv = min_blocklength(q);
    REQUIRE(conv.feasible);
    REQUIRE(achv.feasible);
    CHECK(achv.n >= conv.n);
}

TEST_CASE("min blocklength: infeasible reported with diagnostics") {
    MinLenQuery q;
    q.bound_kind = BoundKind::rcb;
    q.family.is_bec = true;
    q.rate_nats = 0.9 * kLn2;   // above capacity at p = 0.2
    q.target_ln_pe = std::log(1e-5);
    q.operating_point = 0.2;
    q.n_max = 100000;
    const auto res = min_blocklength(q);
    CHECK_FALSE(res.feasible);
    CHECK_FALSE(res.diagnostic.empty());
}

TEST_CASE("dominance region: winners consistent and deterministic") {
    ChannelFamily bpsk;
    const std::vector<double> rates = {0.75, 0.85};
    const std::vector<std::int64_t> ns = {300, 900};
    const auto cells = dominance_region(rates, ns, std::log(1e-5), bpsk);
    REQUIRE(cells.size() == 4);
    for (const auto& c : cells) {
        REQUIRE(c.ok);
        const double best = std::max({c.sp59_db, c.ispvf_db, c.clb_db});
        const double declared = c.winner == RegionWinner::sp59      ? c.sp59_db
                                : c.winner == RegionWinner::isp_or_vf ? c.ispvf_db
                                                                      : c.clb_db;
        CHECK(declared >= best - 2e-3);
    }
    const auto again = dominance_region(rates, ns, std::log(1e-5), bpsk);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(cells[i].winner == again[i].winner);
        CHECK(cells[i].ispvf_db == again[i].ispvf_db);
    }
    CHECK_THROWS_AS(dominance_region({}, ns, std::log(1e-5), bpsk), std::invalid_argument);
}

TEST_CASE("dominance boundary N(R) is non-increasing in rate") {
    ChannelFamily bpsk;
    const double target = std::log(1e-5);
    std::int64_t prev = 1 << 30;
    for (int i = 0; i < 10; ++i) {
        const double rate_bits = 0.72 + 0.02 * i;
        const auto n =
            dominance_boundary_n(rate_bits, target, bpsk, BoundKind::isp, 20, 4000);
        CHECK(n <= prev);
        prev = n;
    }
}
