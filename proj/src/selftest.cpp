#include "spb/selftest.hpp"

#include <cmath>
#include <sstream>

#include "spb/compare.hpp"
#include "spb/log_value.hpp"
#include "spb/sp59.hpp"
#include "spb/sp67_family.hpp"
#include "spb/special_functions.hpp"

namespace spb {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321215;

struct Recorder {
    std::vector<CheckResult>& out;
    std::string suite;

    void record(const std::string& name, bool pass, const std::string& detail = "") {
        out.push_back({suite, name, pass, detail});
    }
    template <class F>
    void guarded(const std::string& name, F&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            record(name, false, std::string("exception: ") + e.what());
        }
    }
};

std::vector<SymmetricChannel> reduced_channels() {
    std::vector<SymmetricChannel> chans;
    chans.emplace_back(BecChannel(0.5));
    chans.emplace_back(BecChannel(0.2));
    chans.emplace_back(MPskAwgnChannel(2, 0.9));
    chans.emplace_back(MPskAwgnChannel(4, 0.5));
    return chans;
}

void suite_numerics(Recorder r) {
    r.guarded("max_star permutation and floor", [&] {
        const std::vector<double> xs = {0.4, -3.0, -40.0, 1.2};
        const std::vector<double> rev(xs.rbegin(), xs.rend());
        const double a = max_star(std::span<const double>(xs));
        const double b = max_star(std::span<const double>(rev));
        r.record("max_star permutation and floor",
                 std::fabs(a - b) < 1e-13 && a >= 1.2, "");
    });
    r.guarded("ln_gamma recurrence", [&] {
        bool ok = true;
        for (double a : {0.7, 3.2, 88.0, 4096.5}) {
            const double lhs = ln_gamma(a + 1.0);
            const double rhs = ln_gamma(a) + std::log(a);
            ok = ok && std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs));
        }
        r.record("ln_gamma recurrence", ok, "");
    });
    r.guarded("ln_q complement", [&] {
        bool ok = true;
        for (double x = -8.0; x <= 8.0; x += 1.0) {
            ok = ok && std::fabs(std::exp(ln_q(x)) + std::exp(ln_q(-x)) - 1.0) < 1e-12;
        }
        r.record("ln_q complement", ok, "");
    });
    r.guarded("integrate_ln gaussian", [&] {
        const double v = integrate_ln([](double t) { return -0.5 * t * t; }, -40.0, 40.0);
        r.record("integrate_ln gaussian",
                 std::fabs(v - 0.5 * std::log(2.0 * M_PI)) < 1e-9, "");
    });
}

void suite_channels(Recorder r, bool perturb) {
    r.guarded("mu0 identity vs e0", [&] {
        bool ok = true;
        std::ostringstream detail;
        for (const auto& ch : reduced_channels()) {
            for (double s : {0.2, 0.5, 0.8}) {
                auto te = mu0_triplet(ch, s);
                double mu0 = te.mu0;
                if (perturb) mu0 = -mu0;  // test-only sensitivity injection
                const double rhs = -(1.0 - s) * e0(ch, s / (1.0 - s));
                if (std::fabs(mu0 - rhs) > 1e-8) {
                    ok = false;
                    detail << "s=" << s << " lhs=" << mu0 << " rhs=" << rhs << "; ";
                }
            }
        }
        r.record("mu0 identity vs e0", ok, detail.str());
    });
    r.guarded("fixed-tilt finite differences", [&] {
        bool ok = true;
        const double h = 1e-5;
        for (const auto& ch : reduced_channels()) {
            for (double s0 : {0.3, 0.6}) {
                const auto te = mu0_triplet(ch, s0);
                TiltDeltas d;
                if (const auto* bec = std::get_if<BecChannel>(&ch)) {
                    d = mu0_frozen_tilt_deltas(*bec, s0, h);
                } else {
                    d = mu0_frozen_tilt_deltas(std::get<MPskAwgnChannel>(ch), s0, h);
                }
                const double fd1 = (d.delta_plus - d.delta_minus) / (2.0 * h);
                const double fd2 = (d.delta_plus + d.delta_minus) / (h * h);
                ok = ok && std::fabs(fd1 - te.mu0_prime) <=
                               1e-5 * std::max(std::fabs(te.mu0_prime), 1e-3);
                ok = ok && std::fabs(fd2 - te.mu0_double_prime) <=
                               1e-5 * std::max(te.mu0_double_prime, 1e-3);
            }
        }
        r.record("fixed-tilt finite differences", ok, "");
    });
    r.guarded("mu0'' non-negative", [&] {
        bool ok = true;
        for (const auto& ch : reduced_channels()) {
            for (double s = 0.1; s < 1.0; s += 0.2) {
                ok = ok && mu0_triplet(ch, s).mu0_double_prime >= -1e-12;
            }
        }
        r.record("mu0'' non-negative", ok, "");
    });
}

void suite_sp67(Recorder r) {
    r.guarded("bound ordering", [&] {
        bool ok = true;
        std::ostringstream detail;
        for (double p : {0.3, 0.5}) {
            for (std::int64_t n : {500, 5000, 50000}) {
                const SymmetricChannel ch{BecChannel(p)};
                const auto code = code_from_rate_bits(n, 0.55 * (1.0 - p));
                const auto i = isp_bound(ch, code);
                const auto v = vf_bound(ch, code, 2);
                const auto s = sp67_classic(ch, code, 2);
                const double r_ub = gallager_rcb(ch, code);
                if (i.status == BoundStatus::ok && v.status == BoundStatus::ok &&
                    v.ln_pe_lower > i.ln_pe_lower + 1e-9) {
                    ok = false;
                    detail << "vf>isp at p=" << p << " n=" << n << "; ";
                }
                if (s.status == BoundStatus::ok && v.status == BoundStatus::ok &&
                    s.ln_pe_lower > v.ln_pe_lower + 1e-9) {
                    ok = false;
                    detail << "sp67>vf at p=" << p << " n=" << n << "; ";
                }
                if (i.status == BoundStatus::ok && i.ln_pe_lower > r_ub + 1e-9) {
                    ok = false;
                    detail << "isp>rcb at p=" << p << " n=" << n << "; ";
                }
            }
        }
        r.record("bound ordering", ok, detail.str());
    });
    r.guarded("exponent consistency", [&] {
        const SymmetricChannel ch{BecChannel(0.5)};
        const double esp = e_sp(ch, 0.3 * kLn2);
        const auto big = isp_bound(ch, code_from_rate_bits(1000000, 0.3));
        r.record("exponent consistency",
                 big.status == BoundStatus::ok && std::fabs(big.exponent - esp) < 1e-3, "");
    });
}

void suite_sp59_oracle(Recorder r) {
    r.guarded("f_N log-domain vs recursion", [&] {
        bool ok = true;
        std::ostringstream detail;
        for (std::int64_t n : {1, 2, 3, 5, 10, 25, 50, 100, 200}) {
            const double xs[6] = {0.0, 0.5, 1.0, 2.0, 5.0, 0.3 * std::sqrt(double(n))};
            for (double x : xs) {
                const double a = std::exp(ln_f_n(n, x));
                const double b = f_n_recursive(n, x);
                if (std::fabs(a - b) > 1e-9 * std::fabs(b)) {
                    ok = false;
                    detail << "n=" << n << " x=" << x << "; ";
                }
            }
        }
        r.record("f_N log-domain vs recursion", ok, detail.str());
    });
    r.guarded("solid angle sandwich", [&] {
        bool ok = true;
        for (int n : {2, 5, 20, 100, 1000}) {
            for (double th : {0.2, 0.7, 1.2}) {
                const auto b = ln_solid_angle_ratio(n, th);
                ok = ok && b.lower <= b.exact + 1e-9 && b.exact <= b.upper + 1e-9;
            }
        }
        r.record("solid angle sandwich", ok, "");
    });
    r.guarded("finite at moderate N", [&] {
        Sp59Params p{2000, 0.5 * kLn2, 1.1};
        const auto res = sp59_bound(p);
        r.record("finite at moderate N", std::isfinite(res.ln_pe_lower), "");
    });
}

void suite_compare(Recorder r) {
    r.guarded("capacity limits", [&] {
        const double p = capacity_limit_erasure_p(0.75 * kLn2);
        const double db = capacity_limit_ebn0_db(2, 0.5 * kLn2);
        r.record("capacity limits",
                 std::fabs(p - 0.25) < 1e-12 && std::fabs(db - 0.187) < 0.05, "");
    });
    r.guarded("minlen sanity", [&] {
        MinLenQuery q;
        q.bound_kind = BoundKind::isp;
        q.family.is_bec = true;
        q.rate_nats = 0.75 * kLn2;
        q.target_ln_pe = std::log(1e-3);
        q.operating_point = 0.15;
        const auto res = min_blocklength(q);
        r.record("minlen sanity", res.feasible && res.n >= 1, "");
    });
}

}  // namespace

std::vector<std::string> selftest_suite_names() {
    return {"numerics", "channels", "sp67", "sp59-oracle", "compare"};
}

std::vector<CheckResult> run_selftest(const std::string& suite_filter, bool perturb) {
    std::vector<CheckResult> out;
    auto want = [&](const std::string& name) {
        return suite_filter.empty() || suite_filter == name;
    };
    if (want("numerics")) suite_numerics({out, "numerics"});
    if (want("channels")) suite_channels({out, "channels"}, perturb);
    if (want("sp67")) suite_sp67({out, "sp67"});
    if (want("sp59-oracle")) suite_sp59_oracle({out, "sp59-oracle"});
    if (want("compare")) suite_compare({out, "compare"});
    return out;
}

}  // namespace spb
