#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace spb {

// Sentinel for ln(0). Kept as -inf so that multiplication (log addition)
// absorbs naturally; max_star treats it as the additive identity.
inline constexpr double kLnZero = -std::numeric_limits<double>::infinity();

inline bool is_ln_zero(double ln_val) { return std::isinf(ln_val) && ln_val < 0.0; }

// ln(e^a + e^b) without exponentiating anything above 0.
inline double max_star(double a, double b) {
    if (is_ln_zero(a)) return b;
    if (is_ln_zero(b)) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

inline double max_star(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("max_star: empty input");
    std::size_t arg = 0;
    double m = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] > m) {
            m = xs[i];
            arg = i;
        }
    }
    if (is_ln_zero(m)) return kLnZero;
    // log1p around the max keeps corrections far below 1 ulp of the sum alive
    double rest = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i == arg) continue;
        const double d = xs[i] - m;
        if (d >= -745.0) rest += std::exp(d);
    }
    return m + std::log1p(rest);
}

// ln(e^a - e^b), requires a >= b. Returns the zero sentinel when equal.
inline double ln_sub(double a, double b) {
    if (is_ln_zero(b)) return a;
    if (b > a) throw std::domain_error("ln_sub: negative result");
    if (b == a) return kLnZero;
    return a + std::log(-std::expm1(b - a));
}

// A non-negative real carried as its natural logarithm.
class LogValue {
  public:
    LogValue() : ln_(kLnZero) {}

    static LogValue from_ln(double ln_val) {
        LogValue v;
        v.ln_ = ln_val;
        return v;
    }
    static LogValue from_linear(double x) {
        if (x < 0.0) throw std::domain_error("LogValue: negative value");
        return from_ln(x == 0.0 ? kLnZero : std::log(x));
    }
    static LogValue zero() { return LogValue(); }
    static LogValue one() { return from_ln(0.0); }

    double ln() const { return ln_; }
    bool is_zero() const { return is_ln_zero(ln_); }
    double to_linear() const { return is_zero() ? 0.0 : std::exp(ln_); }

    LogValue& operator*=(const LogValue& o) {
        ln_ = (is_zero() || o.is_zero()) ? kLnZero : ln_ + o.ln_;
        return *this;
    }
    LogValue& operator+=(const LogValue& o) {
        ln_ = max_star(ln_, o.ln_);
        return *this;
    }

    friend LogValue operator*(LogValue a, const LogValue& b) { return a *= b; }
    friend LogValue operator+(LogValue a, const LogValue& b) { return a += b; }
    friend bool operator<(const LogValue& a, const LogValue& b) { return a.ln_ < b.ln_; }
    friend bool operator>(const LogValue& a, const LogValue& b) { return a.ln_ > b.ln_; }

  private:
    double ln_;
};

}  // namespace spb
