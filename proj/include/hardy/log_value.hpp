#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace hardy {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// A real number stored as sign * exp(log_abs). sign == 0 encodes zero.
struct LogValue {
    double log_abs = kNegInf;
    int sign = 0;

    static LogValue zero() { return {}; }
    static LogValue from_log(double log_abs, int sign = 1) {
        if (log_abs == kNegInf || sign == 0) return {};
        return {log_abs, sign > 0 ? 1 : -1};
    }
    static LogValue from_double(double x) {
        if (x == 0.0) return {};
        return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
    }

    bool is_zero() const { return sign == 0; }
    double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

inline LogValue operator*(LogValue a, LogValue b) {
    if (a.is_zero() || b.is_zero()) return {};
    return {a.log_abs + b.log_abs, a.sign * b.sign};
}

inline LogValue operator/(LogValue a, LogValue b) {
    if (a.is_zero()) return {};
    return {a.log_abs - b.log_abs, a.sign * b.sign};
}

inline LogValue pow_abs(LogValue a, double p) {
    if (a.is_zero()) return {};
    return {p * a.log_abs, 1};
}

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// log(exp(a) - exp(b)) for a >= b.
inline double log_sub_exp(double a, double b) {
    if (b == kNegInf) return a;
    if (b >= a) return kNegInf;
    const double d = b - a;
    // log(1 - e^d): use log(-expm1(d)) near 0 and log1p(-e^d) far away.
    return a + (d > -0.6931471805599453 ? std::log(-std::expm1(d)) : std::log1p(-std::exp(d)));
}

inline LogValue operator+(LogValue a, LogValue b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.sign == b.sign) return {log_add_exp(a.log_abs, b.log_abs), a.sign};
    if (a.log_abs >= b.log_abs) return LogValue::from_log(log_sub_exp(a.log_abs, b.log_abs), a.sign);
    return LogValue::from_log(log_sub_exp(b.log_abs, a.log_abs), b.sign);
}

inline LogValue operator-(LogValue a) { return {a.log_abs, -a.sign}; }
inline LogValue operator-(LogValue a, LogValue b) { return a + (-b); }

/// Relative difference |a - b| / max(|a|, |b|, floor).
inline double relative_difference(double a, double b, double floor = 0.0) {
    const double scale = std::max({std::fabs(a), std::fabs(b), floor});
    if (scale == 0.0) return 0.0;
    return std::fabs(a - b) / scale;
}

}  // namespace hardy
