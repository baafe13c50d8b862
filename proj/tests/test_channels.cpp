#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "spb/quadrature.hpp"

#include "doctest.h"
#include "spb/channels.hpp"
#include "spb/log_value.hpp"

using namespace spb;

namespace {
constexpr double kLn2 = 0.6931471805599453;

// E0(rho, q) on the BEC for an arbitrary binary input distribution; test-side
// oracle for the uniform-input optimality check.
double bec_e0_q(double p, double rho, double q0) {
    const double q1 = 1.0 - q0;
    return -std::log((std::pow(q0, 1.0 + rho) + std::pow(q1, 1.0 + rho)) * (1.0 - p) + p);
}
}  // namespace

TEST_CASE("BEC mu0 closed-form values") {
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto a = mu0_triplet(BecChannel(0.0), s);
        CHECK(a.mu0 == doctest::Approx(-s * kLn2).epsilon(1e-13));
        CHECK(a.mu0_double_prime == doctest::Approx(0.0).epsilon(1e-13));
        const auto b = mu0_triplet(BecChannel(1.0), s);
        CHECK(b.mu0 == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(std::fabs(b.mu0_double_prime) < 1e-12);
    }
    const auto t = mu0_triplet(BecChannel(0.5), 0.5);
    CHECK(t.mu0 == doctest::Approx(0.5 * std::log(3.0) - kLn2).epsilon(1e-13));
}

TEST_CASE("BPSK mu0 matches the Bhattacharyya closed form at s = 1/2") {
    const MPskAwgnChannel ch(2, 1.0);
    const auto t = mu0_triplet(ch, 0.5);
    const double e0_at_1 = kLn2 - std::log(1.0 + std::exp(-0.5));
    CHECK(t.mu0 == doctest::Approx(-0.5 * e0_at_1).epsilon(1e-9));
    CHECK(t.mu0 == doctest::Approx(-0.1095).epsilon(5e-4));
}

TEST_CASE("mu0 is non-positive and mu0'' is non-negative") {
    std::vector<SymmetricChannel> chans;
    chans.emplace_back(BecChannel(0.3));
    chans.emplace_back(BecChannel(0.85));
    chans.emplace_back(MPskAwgnChannel(2, 0.8));
    chans.emplace_back(MPskAwgnChannel(4, 0.5));
    for (const auto& ch : chans) {
        for (double s = 0.05; s < 1.0; s += 0.1) {
            const auto t = mu0_triplet(ch, s);
            CHECK(t.mu0 <= 1e-10);
            CHECK(t.mu0_double_prime >= -1e-12);
        }
    }
}

TEST_CASE("e0 values") {
    CHECK(e0(BecChannel(0.5), 0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(e0(BecChannel(0.5), 1.0) == doctest::Approx(kLn2 - std::log(1.5)).epsilon(1e-13));
    const MPskAwgnChannel bpsk(2, 1.0);
    CHECK(std::fabs(e0(bpsk, 0.0)) < 1e-9);
    CHECK(e0(bpsk, 1.0) ==
          doctest::Approx(kLn2 - std::log(1.0 + std::exp(-0.5))).epsilon(1e-9));
    CHECK(e0(bpsk, 1.0) == doctest::Approx(0.2190).epsilon(5e-4));
    CHECK_THROWS_AS(e0(BecChannel(0.5), -0.5), std::domain_error);
}

TEST_CASE("e0 is non-decreasing and concave in rho") {
    std::vector<SymmetricChannel> chans;
    chans.emplace_back(BecChannel(0.4));
    chans.emplace_back(MPskAwgnChannel(2, 0.9));
    for (const auto& ch : chans) {
        std::vector<double> vals;
        for (int i = 0; i <= 50; ++i) vals.push_back(e0(ch, 10.0 * i / 50.0));
        for (std::size_t i = 1; i < vals.size(); ++i) CHECK(vals[i] >= vals[i - 1] - 1e-9);
        for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
            CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] <= 1e-8);
        }
    }
}

TEST_CASE("tilted-measure identity: mu0 = -(1-s) E0(s/(1-s))") {
    std::vector<SymmetricChannel> chans;
    chans.emplace_back(BecChannel(0.5));
    chans.emplace_back(BecChannel(0.15));
    chans.emplace_back(MPskAwgnChannel(2, 1.0));
    chans.emplace_back(MPskAwgnChannel(4, 0.5));
    chans.emplace_back(MPskAwgnChannel(8, 0.35));
    for (const auto& ch : chans) {
        for (double s = 0.1; s <= 0.91; s += 0.1) {
            const auto t = mu0_triplet(ch, s);
            const double rhs = -(1.0 - s) * e0(ch, s / (1.0 - s));
            CHECK(std::fabs(t.mu0 - rhs) < 1e-8);
        }
    }
}

TEST_CASE("fixed-tilt finite differences reproduce mu0' and mu0''") {
    const double h = 1e-5;
    std::vector<SymmetricChannel> chans;
    chans.emplace_back(BecChannel(0.5));
    chans.emplace_back(BecChannel(0.2));
    chans.emplace_back(MPskAwgnChannel(2, 0.8));
    chans.emplace_back(MPskAwgnChannel(4, 0.5));
    for (const auto& ch : chans) {
        for (double s0 : {0.25, 0.5, 0.75}) {
            const auto t = mu0_triplet(ch, s0);
            TiltDeltas d;
            if (const auto* bec = std::get_if<BecChannel>(&ch)) {
                d = mu0_frozen_tilt_deltas(*bec, s0, h);
            } else {
                d = mu0_frozen_tilt_deltas(std::get<MPskAwgnChannel>(ch), s0, h);
            }
            const double fd_prime = (d.delta_plus - d.delta_minus) / (2.0 * h);
            const double fd_second = (d.delta_plus + d.delta_minus) / (h * h);
            CHECK(std::fabs(fd_prime - t.mu0_prime) <=
                  1e-5 * std::max(std::fabs(t.mu0_prime), 1e-3));
            CHECK(std::fabs(fd_second - t.mu0_double_prime) <=
                  1e-5 * std::max(t.mu0_double_prime, 1e-3));
        }
    }
}

TEST_CASE("frozen tilt at s_tilt = s reproduces mu0") {
    const BecChannel bec(0.35);
    for (double s : {0.2, 0.5, 0.8}) {
        CHECK(mu0_frozen_tilt(bec, s, s) ==
              doctest::Approx(mu0_triplet(bec, s).mu0).epsilon(1e-12));
    }
    const MPskAwgnChannel qpsk(4, 0.5);
    for (double s : {0.3, 0.6}) {
        CHECK(mu0_frozen_tilt(qpsk, s, s) ==
              doctest::Approx(mu0_triplet(qpsk, s).mu0).epsilon(1e-9));
    }
}

TEST_CASE("tilting density: BEC") {
    // p = 0.5: the bit masses match (B.9)-(B.10) and sum to one
    const BecChannel ch(0.5);
    for (double s : {0.2, 0.5, 0.8}) {
        const double c = std::pow(2.0, 1.0 / (1.0 - s));
        const double denom = 2.0 * 0.5 + c * 0.5;
        CHECK(std::exp(ln_tilting_density(ch, s, BecOutput::bit0)) ==
              doctest::Approx(0.5 / denom).epsilon(1e-12));
        const double total = 2.0 * std::exp(ln_tilting_density(ch, s, BecOutput::bit0)) +
                             std::exp(ln_tilting_density(ch, s, BecOutput::erasure));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    // p = 0: no erasures; exact zero sentinel
    const BecChannel noiseless(0.0);
    CHECK(std::exp(ln_tilting_density(noiseless, 0.4, BecOutput::bit0)) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(is_ln_zero(ln_tilting_density(noiseless, 0.4, BecOutput::erasure)));
}

TEST_CASE("tilting density: BPSK normalized geometric mean at the origin") {
    const MPskAwgnChannel ch(2, 1.0);
    const double s = 0.5;
    const auto t = mu0_triplet(ch, s);
    const double theta_ln = t.mu0 / (1.0 - s);
    // p(y|x0) = p(y|x1) at the origin
    const double ln_p0 = -std::log(2.0 * M_PI) - 0.5;
    CHECK(ln_tilting_density(ch, s, {0.0, 0.0}) ==
          doctest::Approx(ln_p0 - theta_ln).epsilon(1e-9));
}

TEST_CASE("tilting density integrates to one (M-PSK)") {
    QuadratureSpec spec;
    // m = 4: sum exp(ln f) against the channel's own quadrature grid
    {
        const MPskAwgnChannel ch(4, 0.6);
        const MpskTiltingDensity f(ch, 0.45, spec);
        auto grid = ch.grid_for_level(ch.calibrated_level(spec) + 1);
        LogValue total = LogValue::zero();
        for (const auto& nd : grid->nodes) {
            total += LogValue::from_ln(nd.ln_quad_w + f.ln_at({nd.y0, nd.y1}));
        }
        CHECK(total.to_linear() == doctest::Approx(1.0).epsilon(1e-9));
    }
    // m = 2: independent nested quadrature over the full plane
    {
        const double sigma = 0.6;
        const MPskAwgnChannel ch(2, sigma);
        const MpskTiltingDensity f(ch, 0.45, spec);
        QuadratureSpec loose = spec;
        loose.rel_tol = 1e-9;
        auto outer = [&](double t) {
            return integrate_ln([&](double u) { return f.ln_at({u, t}); }, -10.0 * sigma,
                                10.0 * sigma, loose);
        };
        const double ln_total =
            integrate_ln(outer, -1.0 - 10.0 * sigma, 1.0 + 10.0 * sigma, loose);
        CHECK(std::exp(ln_total) == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("capacity values") {
    CHECK(capacity(BecChannel(0.25)) == doctest::Approx(0.75 * kLn2).epsilon(1e-14));
    // noiseless limit
    CHECK(capacity(MPskAwgnChannel(2, 0.05)) == doctest::Approx(kLn2).epsilon(1e-4));
    // Monte-Carlo oracle: C = ln2 - E[ln(1 + e^{-2t/sigma^2})], t ~ N(1, sigma^2)
    const double sigma = 1.0;
    std::mt19937_64 rng(20240817);
    std::normal_distribution<double> noise(0.0, sigma);
    double acc = 0.0;
    const int n_samples = 4'000'000;
    for (int i = 0; i < n_samples; ++i) {
        const double t = 1.0 + noise(rng);
        acc += std::log1p(std::exp(-2.0 * t / (sigma * sigma)));
    }
    const double mc = kLn2 - acc / n_samples;
    CHECK(capacity(MPskAwgnChannel(2, sigma)) == doctest::Approx(mc).epsilon(2e-3));
}

TEST_CASE("uniform input maximizes E0 on the BEC") {
    for (double rho : {0.5, 1.0, 2.0}) {
        const double uniform = bec_e0_q(0.4, rho, 0.5);
        CHECK(bec_e0_q(0.4, rho, 0.51) <= uniform + 1e-12);
        CHECK(bec_e0_q(0.4, rho, 0.49) <= uniform + 1e-12);
        CHECK(uniform == doctest::Approx(e0(BecChannel(0.4), rho)).epsilon(1e-12));
    }
}

TEST_CASE("VF nu identities against direct beta sums on the BEC") {
    const double p = 0.3;
    for (double rho : {0.4, 1.0, 2.5}) {
        const double s = rho / (1.0 + rho);
        const double eps = 1.0 / (1.0 + rho);
        // beta_{j,0,rho} over j in {0, erasure}; P(1|0) = 0 drops out.
        const double alpha0 = 0.5 * std::pow(1.0 - p, eps);   // also = alpha1
        const double alphaE = std::pow(p, eps);
        const double beta0 = std::pow(1.0 - p, eps) * std::pow(alpha0, rho);
        const double betaE = std::pow(p, eps) * std::pow(alphaE, rho);
        const double lb0 = std::log(beta0 / (1.0 - p));
        const double lbE = std::log(betaE / p);
        const double denom = beta0 + betaE;
        const double nu1 = (beta0 * lb0 + betaE * lbE) / denom;
        const double nu2 = (beta0 * lb0 * lb0 + betaE * lbE * lbE) / denom - nu1 * nu1;
        const auto t = mu0_triplet(BecChannel(p), s);
        CHECK(nu1 ==
              doctest::Approx(s * (t.mu0_prime + t.mu0 / (1.0 - s))).epsilon(1e-10));
        CHECK(nu2 == doctest::Approx(s * s * t.mu0_double_prime).epsilon(1e-10));
    }
}

TEST_CASE("channel constructor validation") {
    CHECK_THROWS_AS(BecChannel(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(BecChannel(1.5), std::invalid_argument);
    CHECK_THROWS_AS(MPskAwgnChannel(3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MPskAwgnChannel(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(MPskAwgnChannel(0, 1.0), std::invalid_argument);
    // constellation points have unit norm
    const MPskAwgnChannel ch(8, 0.5);
    for (int k = 0; k < 8; ++k) {
        const auto pt = ch.point(k);
        CHECK(pt[0] * pt[0] + pt[1] * pt[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(alphabet_size(SymmetricChannel(BecChannel(0.1))) == 2);
    CHECK(alphabet_size(SymmetricChannel(MPskAwgnChannel(8, 0.5))) == 8);
}
