#include "spb/channels.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>

#include "spb/log_value.hpp"

namespace spb {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321215;
constexpr double kLn2Pi = 1.8378770664093454835606594728;

// 16-point Gauss-Legendre rule on [-1, 1] (positive half; symmetric).
constexpr int kGlHalf = 8;
constexpr double kGlX[kGlHalf] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                  0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                  0.9445750230732326, 0.9894009349916499};
constexpr double kGlW[kGlHalf] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                  0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                  0.0622535239386479, 0.0271524594117541};

double clamp_s(double s) {
    constexpr double eps = 1e-9;
    if (s < eps) return eps;
    if (s > 1.0 - eps) return 1.0 - eps;
    return s;
}

struct GridMoments {
    double theta_ln;  // ln of theta(s), the normalizer of the tilting density
    double mean;      // E[ln S] under the tilted output measure
    double var;       // Var[ln S] under the tilted output measure
};

// ln S(y) = ln[(1/M) sum_k exp((1-s) <y, x_k - x_0> / sigma^2)].
inline double ln_s_at(const MPskAwgnChannel& ch, double y0, double y1, double one_minus_s) {
    const int m = ch.m();
    const double c = one_minus_s / (ch.sigma() * ch.sigma());
    const auto x0 = ch.point(0);
    const double yx0 = y0 * x0[0] + y1 * x0[1];
    double vmax = 0.0;  // k = 0 term
    for (int k = 1; k < m; ++k) {
        const auto xk = ch.point(k);
        const double v = ((y0 * xk[0] + y1 * xk[1]) - yx0) * c;
        if (v > vmax) vmax = v;
    }
    double sum = vmax == 0.0 ? 1.0 : std::exp(-vmax);
    for (int k = 1; k < m; ++k) {
        const auto xk = ch.point(k);
        const double d = ((y0 * xk[0] + y1 * xk[1]) - yx0) * c - vmax;
        if (d >= -50.0) sum += std::exp(d);
    }
    return vmax + std::log(sum) - std::log(static_cast<double>(m));
}

// Same quantity from the grid's precomputed inner products.
inline double ln_s_from_ips(const double* ip, int m, double one_minus_s, double ln_m) {
    double vmax = 0.0;
    for (int k = 1; k < m; ++k) {
        const double v = one_minus_s * ip[k];
        if (v > vmax) vmax = v;
    }
    double sum = vmax == 0.0 ? 1.0 : std::exp(-vmax);
    for (int k = 1; k < m; ++k) {
        const double d = one_minus_s * ip[k] - vmax;
        if (d >= -50.0) sum += std::exp(d);
    }
    return vmax + std::log(sum) - ln_m;
}

GridMoments grid_moments(const MPskAwgnChannel& ch, const MPskAwgnChannel::Grid& grid, double s) {
    const std::size_t n = grid.nodes.size();
    const int m = ch.m();
    const double ln_m = std::log(static_cast<double>(m));
    const double one_minus_s = 1.0 - s;
    const double pw = s / one_minus_s;
    const double inv_1ms = 1.0 / one_minus_s;
    std::vector<double> ln_s(n), tilted(n);
    double theta_max = kLnZero, tilt_max = kLnZero;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = grid.nodes[i];
        const double lsi = ln_s_from_ips(&grid.ips[i * m], m, one_minus_s, ln_m);
        const double base = nd.ln_quad_w + nd.ln_p0;
        ln_s[i] = lsi;
        const double theta_arg = base + lsi * inv_1ms;
        tilted[i] = base + pw * lsi;
        if (theta_arg > theta_max) theta_max = theta_arg;
        if (tilted[i] > tilt_max) tilt_max = tilted[i];
    }
    double theta_sum = 0.0, e_sum = 0.0, m1_num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = grid.nodes[i];
        const double base = nd.ln_quad_w + nd.ln_p0;
        const double ta = base + ln_s[i] * inv_1ms - theta_max;
        if (ta >= -700.0) theta_sum += std::exp(ta);
        const double te = tilted[i] - tilt_max;
        const double e = te >= -700.0 ? std::exp(te) : 0.0;
        tilted[i] = e;
        e_sum += e;
        m1_num += e * ln_s[i];
    }
    const double mean = m1_num / e_sum;
    double var_num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = ln_s[i] - mean;
        var_num += tilted[i] * d * d;
    }
    return {theta_max + std::log(theta_sum), mean, var_num / e_sum};
}

TiltingEvaluation triplet_from_moments(double s, const GridMoments& gm) {
    TiltingEvaluation te;
    te.s = s;
    const double inv_1ms = 1.0 / (1.0 - s);
    te.mu0 = (1.0 - s) * gm.theta_ln;
    te.mu0_prime = gm.mean * inv_1ms - gm.theta_ln;
    te.mu0_double_prime = gm.var * inv_1ms * inv_1ms;
    return te;
}

bool moments_close(const TiltingEvaluation& a, const TiltingEvaluation& b, double rel_tol) {
    auto close = [rel_tol](double x, double y) {
        return std::fabs(x - y) <= rel_tol * std::max({std::fabs(x), std::fabs(y), 0.05});
    };
    return close(a.mu0, b.mu0) && close(a.mu0_prime, b.mu0_prime) &&
           close(a.mu0_double_prime, b.mu0_double_prime);
}

}  // namespace

BecChannel::BecChannel(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("BecChannel: p must be in [0, 1]");
}

MPskAwgnChannel::MPskAwgnChannel(int m, double sigma) : m_(m), sigma_(sigma) {
    if (m < 2 || (m & (m - 1)) != 0)
        throw std::invalid_argument("MPskAwgnChannel: m must be a power of two >= 2");
    if (!(sigma > 0.0)) throw std::invalid_argument("MPskAwgnChannel: sigma must be > 0");
    points_.resize(m);
    for (int k = 0; k < m; ++k) {
        const double th = (2.0 * k + 1.0) * M_PI / m;
        points_[k] = {std::cos(th), std::sin(th)};
    }
}

std::shared_ptr<const MPskAwgnChannel::Grid> MPskAwgnChannel::grid_for_level(int level) const {
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->grids.find(level);
        if (it != cache_->grids.end()) return it->second;
    }
    auto grid = build_grid(level);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto [it, inserted] = cache_->grids.emplace(level, std::move(grid));
    return it->second;
}

void MPskAwgnChannel::fill_ips(Grid& grid) const {
    const std::size_t n = grid.nodes.size();
    grid.ips.resize(n * m_);
    const double inv_sig2 = 1.0 / (sigma_ * sigma_);
    const auto x0 = points_[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double y0 = grid.nodes[i].y0, y1 = grid.nodes[i].y1;
        const double yx0 = y0 * x0[0] + y1 * x0[1];
        for (int k = 0; k < m_; ++k) {
            grid.ips[i * m_ + k] = ((y0 * points_[k][0] + y1 * points_[k][1]) - yx0) * inv_sig2;
        }
    }
}

std::shared_ptr<const MPskAwgnChannel::Grid> MPskAwgnChannel::build_grid(int level) const {
    auto grid = std::make_shared<Grid>();
    const double trunc = 12.0;  // truncation_sigmas default; mass beyond is < e^-72
    const double scale = std::pow(0.5, level);

    if (m_ == 2) {
        // Only the component of y along x_1 - x_0 matters; the orthogonal
        // dimension integrates out. x_0 = (0, 1), so the axis is the second
        // coordinate.
        const double lo = -1.0 - trunc * sigma_;
        const double hi = 1.0 + trunc * sigma_;
        const double target = sigma_ * scale;
        const int n_panels = std::max(8, static_cast<int>(std::ceil((hi - lo) / target)));
        const double w = (hi - lo) / n_panels;
        const double ln_norm = -0.5 * (kLn2Pi + 2.0 * std::log(sigma_));
        grid->nodes.reserve(static_cast<std::size_t>(n_panels) * 2 * kGlHalf);
        for (int p = 0; p < n_panels; ++p) {
            const double mid = lo + (p + 0.5) * w;
            const double half = 0.5 * w;
            for (int g = 0; g < kGlHalf; ++g) {
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    const double t = mid + sgn * half * kGlX[g];
                    Node nd;
                    nd.y0 = 0.0;
                    nd.y1 = t;
                    nd.ln_quad_w = std::log(kGlW[g] * half);
                    const double d = t - 1.0;
                    nd.ln_p0 = ln_norm - d * d / (2.0 * sigma_ * sigma_);
                    grid->nodes.push_back(nd);
                }
            }
        }
        fill_ips(*grid);
        return grid;
    }

    // Polar grid over the half plane psi in [pi/m, pi/m + pi] (the integrand
    // is symmetric about the axis through x_0); the factor 2 is folded into
    // the weights. Angular panels align with the constellation sectors.
    const double r_max = 1.0 + trunc * sigma_;
    const double rad_target = sigma_ * scale;
    const int n_rad = std::max(8, static_cast<int>(std::ceil(r_max / rad_target)));
    const double half_sector = M_PI / m_;
    const double ang_target = 0.5 * sigma_ * scale;
    const int per_half_sector =
        std::max(1, static_cast<int>(std::ceil(half_sector / ang_target)));
    const int n_ang = m_ * per_half_sector;  // m half-sectors cover the half plane
    const double psi0 = M_PI / m_;
    const double dr = r_max / n_rad;
    const double dpsi = M_PI / n_ang;
    const double ln_norm = -kLn2Pi - 2.0 * std::log(sigma_);
    const auto x0 = points_[0];
    grid->nodes.reserve(static_cast<std::size_t>(n_rad) * n_ang * 4 * kGlHalf * kGlHalf);
    for (int pr = 0; pr < n_rad; ++pr) {
        const double rm = (pr + 0.5) * dr;
        const double rh = 0.5 * dr;
        for (int pa = 0; pa < n_ang; ++pa) {
            const double am = psi0 + (pa + 0.5) * dpsi;
            const double ah = 0.5 * dpsi;
            for (int gr = 0; gr < kGlHalf; ++gr) {
                for (int sr = -1; sr <= 1; sr += 2) {
                    const double r = rm + sr * rh * kGlX[gr];
                    for (int ga = 0; ga < kGlHalf; ++ga) {
                        for (int sa = -1; sa <= 1; sa += 2) {
                            const double psi = am + sa * ah * kGlX[ga];
                            Node nd;
                            nd.y0 = r * std::cos(psi);
                            nd.y1 = r * std::sin(psi);
                            // x2 for the suppressed mirror half plane
                            nd.ln_quad_w =
                                std::log(2.0 * kGlW[gr] * rh * kGlW[ga] * ah * r);
                            const double d0 = nd.y0 - x0[0];
                            const double d1 = nd.y1 - x0[1];
                            nd.ln_p0 =
                                ln_norm - (d0 * d0 + d1 * d1) / (2.0 * sigma_ * sigma_);
                            grid->nodes.push_back(nd);
                        }
                    }
                }
            }
        }
    }
    fill_ips(*grid);
    return grid;
}

int MPskAwgnChannel::calibrated_level(const QuadratureSpec& spec) const {
    const auto key = std::bit_cast<unsigned long long>(spec.rel_tol);
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->calibrated.find(key);
        if (it != cache_->calibrated.end()) return it->second;
    }
    constexpr double probes[3] = {0.1, 0.5, 0.9};
    int chosen = -1;
    for (int level = 0; level <= 3 && chosen < 0; ++level) {
        auto coarse = grid_for_level(level);
        auto fine = grid_for_level(level + 1);
        bool ok = true;
        for (double s : probes) {
            const auto a = triplet_from_moments(s, grid_moments(*this, *coarse, s));
            const auto b = triplet_from_moments(s, grid_moments(*this, *fine, s));
            if (!moments_close(a, b, spec.rel_tol)) {
                ok = false;
                break;
            }
        }
        if (ok) chosen = level;
    }
    if (chosen < 0)
        throw NumericalError("mu0_triplet: polar quadrature did not converge", 0.0, 0.0);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->calibrated.emplace(key, chosen);
    return chosen;
}

TiltingEvaluation mu0_triplet(const BecChannel& ch, double s) {
    s = clamp_s(s);
    const double p = ch.p();
    TiltingEvaluation te;
    te.s = s;
    const double ln_c = s * kLn2 / (1.0 - s);
    const double ln_p = p > 0.0 ? std::log(p) : kLnZero;
    const double ln_1mp = p < 1.0 ? std::log1p(-p) : kLnZero;
    const double ln_a = kLn2 + max_star(ln_1mp, ln_c + ln_p);  // A = 2(1-p) + 2^{1/(1-s)} p
    te.mu0 = (1.0 - s) * ln_a - kLn2;
    const double ln_w = ln_c + ln_p - (ln_a - kLn2);      // w = cp / (1-p+cp)
    const double ln_1mw = ln_1mp - (ln_a - kLn2);         // 1-w = (1-p) / (1-p+cp)
    const double w = std::exp(ln_w);
    const double gap = kLn2 / (1.0 - s);
    te.mu0_prime = -ln_a + w * gap;
    te.mu0_double_prime = std::exp(ln_w + ln_1mw) * gap * gap;
    return te;
}

TiltingEvaluation mu0_triplet(const MPskAwgnChannel& ch, double s, const QuadratureSpec& spec) {
    spec.validate();
    s = clamp_s(s);
    const int level = ch.calibrated_level(spec);
    auto grid = ch.grid_for_level(level);
    return triplet_from_moments(s, grid_moments(ch, *grid, s));
}

TiltingEvaluation mu0_triplet(const SymmetricChannel& ch, double s, const QuadratureSpec& spec) {
    if (const auto* bec = std::get_if<BecChannel>(&ch)) return mu0_triplet(*bec, s);
    return mu0_triplet(std::get<MPskAwgnChannel>(ch), s, spec);
}

double e0(const BecChannel& ch, double rho) {
    if (!(rho >= 0.0)) throw std::domain_error("e0: requires rho >= 0");
    const double p = ch.p();
    const double ln_p = p > 0.0 ? std::log(p) : kLnZero;
    const double ln_1mp = p < 1.0 ? std::log1p(-p) : kLnZero;
    return rho * kLn2 - max_star(ln_1mp, rho * kLn2 + ln_p);
}

double e0(const MPskAwgnChannel& ch, double rho, const QuadratureSpec& spec) {
    if (!(rho >= 0.0)) throw std::domain_error("e0: requires rho >= 0");
    spec.validate();
    if (rho == 0.0) return 0.0;
    const double sigma = ch.sigma();
    const double eps = 1.0 / (1.0 + rho);
    const double trunc = spec.truncation_sigmas;
    if (ch.m() == 2) {
        const double lim = 1.0 + trunc * sigma;
        auto f = [&](double t) {
            const double a = -eps * (t - 1.0) * (t - 1.0) / (2.0 * sigma * sigma);
            const double b = -eps * (t + 1.0) * (t + 1.0) / (2.0 * sigma * sigma);
            return (1.0 + rho) * (max_star(a, b) - kLn2);
        };
        const double ln_int = integrate_ln(f, -lim, lim, spec);
        return -(ln_int - 0.5 * (kLn2Pi + 2.0 * std::log(sigma)));
    }
    const int m = ch.m();
    const double r_max = 1.0 + trunc * sigma;
    const double ln_norm = -kLn2Pi - 2.0 * std::log(sigma);
    std::vector<double> ips(m);
    auto integrand = [&](double r, double psi) {
        const double y0 = r * std::cos(psi), y1 = r * std::sin(psi);
        double vmax = kLnZero;
        for (int k = 0; k < m; ++k) {
            const auto xk = ch.point(k);
            const double d0 = y0 - xk[0], d1 = y1 - xk[1];
            const double v = eps * (ln_norm - (d0 * d0 + d1 * d1) / (2.0 * sigma * sigma));
            ips[k] = v;
            if (v > vmax) vmax = v;
        }
        double sum = 0.0;
        for (int k = 0; k < m; ++k) {
            const double d = ips[k] - vmax;
            if (d >= -50.0) sum += std::exp(d);
        }
        const double ln_avg = vmax + std::log(sum) - std::log(static_cast<double>(m));
        return (1.0 + rho) * ln_avg;
    };
    // One constellation sector, halved again by reflection symmetry about x_0.
    auto outer = [&](double psi) {
        return integrate_ln([&](double r) { return integrand(r, psi) + std::log(r); }, 1e-12,
                            r_max, spec);
    };
    const double ln_int = integrate_ln(outer, M_PI / m, 2.0 * M_PI / m, spec);
    return -(ln_int + std::log(2.0 * m));
}

double e0(const SymmetricChannel& ch, double rho, const QuadratureSpec& spec) {
    if (const auto* bec = std::get_if<BecChannel>(&ch)) return e0(*bec, rho);
    return e0(std::get<MPskAwgnChannel>(ch), rho, spec);
}

double capacity(const BecChannel& ch) { return (1.0 - ch.p()) * kLn2; }

double capacity(const MPskAwgnChannel& ch, const QuadratureSpec& spec) {
    spec.validate();
    const int level = ch.calibrated_level(spec);
    auto grid = ch.grid_for_level(level);
    const int m = ch.m();
    const double ln_m = std::log(static_cast<double>(m));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < grid->nodes.size(); ++i) {
        const auto& nd = grid->nodes[i];
        const double ln_t = ln_s_from_ips(&grid->ips[i * m], m, 1.0, ln_m);
        const double w = std::exp(nd.ln_quad_w + nd.ln_p0);
        num += w * ln_t;
        den += w;
    }
    return -num / den;
}

double capacity(const SymmetricChannel& ch, const QuadratureSpec& spec) {
    if (const auto* bec = std::get_if<BecChannel>(&ch)) return capacity(*bec);
    return capacity(std::get<MPskAwgnChannel>(ch), spec);
}

namespace {

struct BecTilt {
    double ln_f_bit;  // f_s(0) = f_s(1)
    double ln_f_era;
};

BecTilt bec_tilt(double p, double s) {
    const double ln_c = s * kLn2 / (1.0 - s);
    const double ln_p = p > 0.0 ? std::log(p) : kLnZero;
    const double ln_1mp = p < 1.0 ? std::log1p(-p) : kLnZero;
    const double ln_a = kLn2 + max_star(ln_1mp, ln_c + ln_p);
    return {ln_1mp - ln_a, kLn2 + ln_c + ln_p - ln_a};
}

}  // namespace

double ln_tilting_density(const BecChannel& ch, double s, BecOutput y) {
    s = clamp_s(s);
    const auto t = bec_tilt(ch.p(), s);
    switch (y) {
        case BecOutput::bit0:
        case BecOutput::bit1:
            return t.ln_f_bit;
        case BecOutput::erasure:
            return t.ln_f_era;
    }
    throw std::invalid_argument("ln_tilting_density: output outside alphabet");
}

MpskTiltingDensity::MpskTiltingDensity(const MPskAwgnChannel& ch, double s,
                                       const QuadratureSpec& spec)
    : ch_(ch), s_(clamp_s(s)) {
    const auto te = mu0_triplet(ch_, s_, spec);
    theta_ln_ = te.mu0 / (1.0 - s_);
}

double MpskTiltingDensity::ln_at(std::array<double, 2> y) const {
    const double ln_s_val = ln_s_at(ch_, y[0], y[1], 1.0 - s_);
    const auto x0 = ch_.point(0);
    const double d0 = y[0] - x0[0], d1 = y[1] - x0[1];
    const double sigma = ch_.sigma();
    const double ln_p0 =
        -kLn2Pi - 2.0 * std::log(sigma) - (d0 * d0 + d1 * d1) / (2.0 * sigma * sigma);
    return ln_p0 + ln_s_val / (1.0 - s_) - theta_ln_;
}

double ln_tilting_density(const MPskAwgnChannel& ch, double s, std::array<double, 2> y,
                          const QuadratureSpec& spec) {
    return MpskTiltingDensity(ch, s, spec).ln_at(y);
}

double mu0_frozen_tilt(const BecChannel& ch, double s, double s_tilt) {
    s_tilt = clamp_s(s_tilt);
    const double p = ch.p();
    const auto t = bec_tilt(p, s_tilt);
    const double ln_p = p > 0.0 ? std::log(p) : kLnZero;
    const double ln_1mp = p < 1.0 ? std::log1p(-p) : kLnZero;
    // P(1|0) = 0, so only the correct bit and the erasure contribute.
    return max_star((1.0 - s) * ln_1mp + s * t.ln_f_bit, (1.0 - s) * ln_p + s * t.ln_f_era);
}

double mu0_frozen_tilt(const MPskAwgnChannel& ch, double s, double s_tilt,
                       const QuadratureSpec& spec) {
    spec.validate();
    s_tilt = clamp_s(s_tilt);
    const int level = ch.calibrated_level(spec);
    auto grid = ch.grid_for_level(level);
    const auto gm = grid_moments(ch, *grid, s_tilt);
    const double inv_1ms = 1.0 / (1.0 - s_tilt);
    const int m = ch.m();
    const double ln_m = std::log(static_cast<double>(m));
    std::vector<double> terms;
    terms.reserve(grid->nodes.size());
    for (std::size_t i = 0; i < grid->nodes.size(); ++i) {
        const auto& nd = grid->nodes[i];
        const double lsi = ln_s_from_ips(&grid->ips[i * m], m, 1.0 - s_tilt, ln_m);
        const double ln_f = nd.ln_p0 + lsi * inv_1ms - gm.theta_ln;
        terms.push_back(nd.ln_quad_w + (1.0 - s) * nd.ln_p0 + s * ln_f);
    }
    return max_star(std::span<const double>(terms));
}

TiltDeltas mu0_frozen_tilt_deltas(const BecChannel& ch, double s0, double h) {
    s0 = clamp_s(s0);
    const double p = ch.p();
    const auto t = bec_tilt(p, s0);
    const double ln_p = p > 0.0 ? std::log(p) : kLnZero;
    const double ln_1mp = p < 1.0 ? std::log1p(-p) : kLnZero;
    const double a_bit = (1.0 - s0) * ln_1mp + s0 * t.ln_f_bit;
    const double a_era = (1.0 - s0) * ln_p + s0 * t.ln_f_era;
    const double norm = max_star(a_bit, a_era);
    const double pi_bit = is_ln_zero(a_bit) ? 0.0 : std::exp(a_bit - norm);
    const double pi_era = is_ln_zero(a_era) ? 0.0 : std::exp(a_era - norm);
    const double z = pi_bit + pi_era;
    const double b_bit = t.ln_f_bit - ln_1mp;
    const double b_era = t.ln_f_era - ln_p;
    TiltDeltas d;
    double acc_p = 0.0, acc_m = 0.0;
    if (pi_bit > 0.0) {
        acc_p += pi_bit / z * std::expm1(h * b_bit);
        acc_m += pi_bit / z * std::expm1(-h * b_bit);
    }
    if (pi_era > 0.0) {
        acc_p += pi_era / z * std::expm1(h * b_era);
        acc_m += pi_era / z * std::expm1(-h * b_era);
    }
    d.delta_plus = std::log1p(acc_p);
    d.delta_minus = std::log1p(acc_m);
    return d;
}

TiltDeltas mu0_frozen_tilt_deltas(const MPskAwgnChannel& ch, double s0, double h,
                                  const QuadratureSpec& spec) {
    spec.validate();
    s0 = clamp_s(s0);
    const int level = ch.calibrated_level(spec);
    auto grid = ch.grid_for_level(level);
    const auto gm = grid_moments(ch, *grid, s0);
    const double inv_1ms = 1.0 / (1.0 - s0);
    const std::size_t n = grid->nodes.size();
    const int m = ch.m();
    const double ln_m = std::log(static_cast<double>(m));
    std::vector<double> ln_pi(n), b(n);
    double pi_max = kLnZero;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = grid->nodes[i];
        const double lsi = ln_s_from_ips(&grid->ips[i * m], m, 1.0 - s0, ln_m);
        b[i] = lsi * inv_1ms - gm.theta_ln;  // ln f - ln p0
        ln_pi[i] = nd.ln_quad_w + nd.ln_p0 + s0 * b[i];
        if (ln_pi[i] > pi_max) pi_max = ln_pi[i];
    }
    double z = 0.0, acc_p = 0.0, acc_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(ln_pi[i] - pi_max);
        z += e;
        acc_p += e * std::expm1(h * b[i]);
        acc_m += e * std::expm1(-h * b[i]);
    }
    return {std::log1p(acc_p / z), std::log1p(acc_m / z)};
}

int alphabet_size(const SymmetricChannel& ch) {
    if (std::holds_alternative<BecChannel>(ch)) return 2;
    return std::get<MPskAwgnChannel>(ch).m();
}

}  // namespace spb
