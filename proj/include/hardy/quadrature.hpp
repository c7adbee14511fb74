#pragma once

// Adaptive Gauss-Kronrod quadrature for single-signed integrands given in
// log-magnitude form. The integrand is rescaled by its sampled peak before
// summation, so integrals whose value is far outside the double range
// (e.g. the integral of e^{1/s} near s = 0) are still returned as logs.

#include <functional>
#include <vector>

#include "hardy/log_value.hpp"

namespace hardy::quadrature {

/// Integrand returning log|f(x)| and sign(f(x)).
using LogIntegrand = std::function<LogValue(double)>;

struct Options {
    double rel_tol = 1e-10;
    /// Absolute floor, measured relative to the largest sampled |integrand|.
    double abs_tol = 1e-14;
    int max_intervals = 4000;
    bool singular_left = false;
    bool singular_right = false;
};

struct QuadratureResult {
    double value = 0.0;            // sign * exp(log_abs); may be +-inf
    double log_abs = kNegInf;
    int sign = 0;
    double abs_error_estimate = 0.0;
    double rel_error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;

    LogValue log_value() const { return LogValue::from_log(log_abs, sign); }
};

/// Integrates f over [a, b]. With options.singular_left (singular_right) the
/// substitution x = a + (b-a) exp(-exp(u)) (mirrored at b) is applied first,
/// clustering nodes doubly-exponentially at that endpoint.
QuadratureResult integrate(const LogIntegrand& f, double a, double b, const Options& options = {});

/// Plain-valued entry point: integrand f(t) on [a, b] with an optional
/// endpoint singularity at a.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                           bool singular_at_a);

/// Integral of g(y) over (-inf, y_max]. Uses y = y_max - exp(u); the upper
/// u bound grows until the integrand is negligible. converged == false if it
/// never becomes negligible.
QuadratureResult integrate_to_minus_infinity(const LogIntegrand& g, double y_max,
                                             const Options& options = {});

enum class Verdict { convergent, divergent, inconclusive };

struct ProbePoint {
    double epsilon;
    double partial_integral;   // may be +inf when only the log is representable
    double log_partial_integral;
};

struct DivergenceVerdict {
    Verdict verdict = Verdict::inconclusive;
    double value = 0.0;  // extrapolated integral when convergent
    std::vector<ProbePoint> probe_trace;  // epsilon strictly decreasing
};

/// Tests whether the improper integral of a positive f over (0, b] is finite
/// by probing I(eps) = int_eps^b f for eps = b 4^{-j}, j = 1..levels.
DivergenceVerdict probe_divergence(const LogIntegrand& f, double b, int levels = 12);

const char* to_string(Verdict v);

}  // namespace hardy::quadrature
