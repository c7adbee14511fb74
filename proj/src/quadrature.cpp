#include "hardy/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

#include "hardy/errors.hpp"

namespace hardy::quadrature {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for Kronrod nodes 1, 3, 5, 7.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEpsilon = 2.220446049250313e-16;
constexpr double kULow = -40.0;
// Scaled integrand values above e^kRescaleTrigger force a restart with a new peak.
constexpr double kRescaleTrigger = 600.0;

struct Rescale {
    double new_peak;
};

// Integrand on the substituted variable u, already including log|dx/du|.
class Substituted {
public:
    Substituted(const LogIntegrand& f, double a, double b, int mode) : f_(f), a_(a), b_(b), mode_(mode) {}

    LogValue operator()(double u) const {
        double x = 0.0;
        double log_jac = 0.0;
        if (mode_ == 0) {
            x = u;
        } else {
            const double eu = std::exp(u);
            const double frac = std::exp(-eu);
            const double width = b_ - a_;
            x = mode_ > 0 ? a_ + width * frac : b_ - width * frac;
            log_jac = std::log(width) + u - eu;
        }
        ++evaluations;
        const LogValue v = f_(x);
        if (std::isnan(v.log_abs) || v.log_abs == kPosInf) {
            std::ostringstream msg;
            msg << "non-finite integrand at x = " << x;
            throw EvaluationError(msg.str());
        }
        if (v.is_zero()) return {};
        return {v.log_abs + log_jac, v.sign};
    }

    mutable long evaluations = 0;

private:
    const LogIntegrand& f_;
    double a_, b_;
    int mode_;  // 0 plain, +1 singular at a, -1 singular at b
};

struct Interval {
    double lo, hi;
    double value;
    double error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

double scaled(const LogValue& v, double peak) {
    if (v.is_zero()) return 0.0;
    const double e = v.log_abs - peak;
    if (e > kRescaleTrigger) throw Rescale{v.log_abs};
    return v.sign * std::exp(e);
}

Interval kronrod(const Substituted& g, double lo, double hi, double peak) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = scaled(g(center), peak);
    double resk = fc * kKronrodWeights[7];
    double resg = fc * kGaussWeights[3];
    double resabs = std::fabs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = scaled(g(center - dx), peak);
        f2[j] = scaled(g(center + dx), peak);
        const double sum = f1[j] + f2[j];
        resk += kKronrodWeights[j] * sum;
        resabs += kKronrodWeights[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) resg += kGaussWeights[j / 2] * sum;
    }
    const double reskh = 0.5 * resk;
    double resasc = kKronrodWeights[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kKronrodWeights[j] * (std::fabs(f1[j] - reskh) + std::fabs(f2[j] - reskh));
    }
    resk *= half;
    resasc *= std::fabs(half);
    resabs *= std::fabs(half);
    double err = std::fabs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > 1e-290) err = std::max(50.0 * kEpsilon * resabs, err);
    return {lo, hi, resk, err};
}

QuadratureResult adaptive(const Substituted& g, double lo, double hi, const Options& options) {
    QuadratureResult out;
    // Locate the peak so the scaled integrand is O(1).
    double peak = kNegInf;
    constexpr int kSamples = 48;
    for (int i = 0; i <= kSamples; ++i) {
        const double u = lo + (hi - lo) * (i + 0.5) / (kSamples + 1);
        const LogValue v = g(u);
        if (!v.is_zero()) peak = std::max(peak, v.log_abs);
    }
    if (peak == kNegInf) peak = 0.0;
    // A log-magnitude of size |peak| carries absolute rounding ~eps |peak|,
    // so no relative accuracy beyond that is attainable.
    const double rel_tol = std::max(options.rel_tol, 16.0 * kEpsilon * std::fabs(peak));

    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            std::priority_queue<Interval> active;
            std::vector<Interval> frozen;
            Interval first = kronrod(g, lo, hi, peak);
            double total = first.value;
            double total_err = first.error;
            active.push(first);
            const double min_width = 1e-13 * (hi - lo);
            int count = 1;
            bool ok = false;
            while (true) {
                const double target = std::max(rel_tol * std::fabs(total), options.abs_tol);
                if (total_err <= target) {
                    ok = true;
                    break;
                }
                if (active.empty() || count >= options.max_intervals) break;
                Interval worst = active.top();
                active.pop();
                if (worst.hi - worst.lo < min_width) {
                    frozen.push_back(worst);
                    continue;
                }
                const double mid = 0.5 * (worst.lo + worst.hi);
                Interval left = kronrod(g, worst.lo, mid, peak);
                Interval right = kronrod(g, mid, worst.hi, peak);
                total += left.value + right.value - worst.value;
                total_err += left.error + right.error - worst.error;
                active.push(left);
                active.push(right);
                ++count;
            }
            // Re-sum to shed accumulated rounding from the incremental updates.
            double sum = 0.0, err = 0.0;
            for (const auto& iv : frozen) {
                sum += iv.value;
                err += iv.error;
            }
            while (!active.empty()) {
                sum += active.top().value;
                err += active.top().error;
                active.pop();
            }
            out.converged = ok || err <= std::max(rel_tol * std::fabs(sum), options.abs_tol);
            out.evaluations = g.evaluations;
            if (sum == 0.0) {
                out.sign = 0;
                out.log_abs = kNegInf;
                out.value = 0.0;
                out.abs_error_estimate = err == 0.0 ? 0.0 : err * std::exp(peak);
                out.rel_error_estimate = 0.0;
                return out;
            }
            out.sign = sum > 0 ? 1 : -1;
            out.log_abs = std::log(std::fabs(sum)) + peak;
            out.value = out.sign * std::exp(out.log_abs);
            out.rel_error_estimate = err / std::fabs(sum);
            out.abs_error_estimate = err * std::exp(peak);
            return out;
        } catch (const Rescale& r) {
            peak = r.new_peak;
        }
    }
    throw EvaluationError("quadrature could not find a stable scale for the integrand");
}

QuadratureResult combine(const QuadratureResult& a, const QuadratureResult& b) {
    QuadratureResult out;
    const LogValue sum = a.log_value() + b.log_value();
    out.log_abs = sum.log_abs;
    out.sign = sum.sign;
    out.value = sum.to_double();
    out.abs_error_estimate = a.abs_error_estimate + b.abs_error_estimate;
    const double rel_a = a.rel_error_estimate, rel_b = b.rel_error_estimate;
    out.rel_error_estimate = std::max(rel_a, rel_b);
    out.evaluations = a.evaluations + b.evaluations;
    out.converged = a.converged && b.converged;
    return out;
}

// Upper end of the u-range for the endpoint substitution: keep the node
// distinguishable from the endpoint and above the double underflow limit.
double substitution_u_high(double endpoint, double width) {
    double limit = 690.0;
    if (endpoint != 0.0) {
        limit = std::min(limit, std::log(width / (std::fabs(endpoint) * 4.0 * kEpsilon)));
    }
    return std::log(std::max(limit, 1.0));
}

}  // namespace

QuadratureResult integrate(const LogIntegrand& f, double a, double b, const Options& options) {
    if (!(b > a)) {
        if (a == b) return QuadratureResult{};
        throw DomainError("integrate: requires b > a");
    }
    if (options.singular_left && options.singular_right) {
        const double mid = 0.5 * (a + b);
        Options left = options, right = options;
        left.singular_right = false;
        right.singular_left = false;
        return combine(integrate(f, a, mid, left), integrate(f, mid, b, right));
    }
    if (options.singular_left) {
        Substituted g(f, a, b, +1);
        return adaptive(g, kULow, substitution_u_high(a, b - a), options);
    }
    if (options.singular_right) {
        Substituted g(f, a, b, -1);
        return adaptive(g, kULow, substitution_u_high(b, b - a), options);
    }
    Substituted g(f, a, b, 0);
    return adaptive(g, a, b, options);
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                           bool singular_at_a) {
    if (!(a >= 0.0) || !(b > a)) throw DomainError("integrate: requires 0 <= a < b");
    if (!(tol > 0.0)) throw DomainError("integrate: requires tol > 0");
    Options options;
    options.rel_tol = tol;
    options.singular_left = singular_at_a;
    const LogIntegrand wrapped = [&f](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "non-finite integrand at x = " << x;
            throw EvaluationError(msg.str());
        }
        return LogValue::from_double(v);
    };
    return integrate(wrapped, a, b, options);
}

QuadratureResult integrate_to_minus_infinity(const LogIntegrand& g, double y_max, const Options& options) {
    const LogIntegrand in_u = [&g, y_max](double u) {
        const double eu = std::exp(u);
        const LogValue v = g(y_max - eu);
        if (v.is_zero()) return v;
        return LogValue{v.log_abs + u, v.sign};
    };
    // Grow the upper u bound until the integrand has dropped far below its peak.
    constexpr double kNegligible = 60.0;
    constexpr int kUMax = 30;
    double best = kNegInf;
    double previous = kNegInf;
    int upper = kUMax;
    bool negligible = false;
    for (int u = 0; u <= kUMax; ++u) {
        const LogValue v = in_u(static_cast<double>(u));
        if (std::isnan(v.log_abs) || v.log_abs == kPosInf) {
            throw EvaluationError("non-finite integrand while locating the tail of (-inf, y]");
        }
        const double lv = v.is_zero() ? kNegInf : v.log_abs;
        best = std::max(best, lv);
        if (u >= 2 && (lv == kNegInf || (lv < best - kNegligible && lv <= previous))) {
            upper = u;
            negligible = true;
            break;
        }
        previous = lv;
    }
    Options plain = options;
    plain.singular_left = plain.singular_right = false;
    QuadratureResult r = integrate(in_u, kULow, static_cast<double>(upper), plain);
    r.converged = r.converged && negligible;
    return r;
}

DivergenceVerdict probe_divergence(const LogIntegrand& f, double b, int levels) {
    if (!(b > 0.0)) throw DomainError("probe_divergence: requires b > 0");
    if (levels < 5) throw DomainError("probe_divergence: needs at least 5 levels");
    DivergenceVerdict out;
    std::vector<double> log_pieces;
    double log_total = kNegInf;
    double upper = b;
    for (int j = 1; j <= levels; ++j) {
        const double eps = b * std::pow(4.0, -j);
        Options options;
        const LogValue fl = f(eps), fr = f(upper);
        if (!fl.is_zero() && (fr.is_zero() || fl.log_abs > fr.log_abs + 5.0)) options.singular_left = true;
        const QuadratureResult piece = integrate(f, eps, upper, options);
        const double lp = piece.sign > 0 ? piece.log_abs : kNegInf;
        log_pieces.push_back(lp);
        log_total = log_add_exp(log_total, lp);
        out.probe_trace.push_back({eps, std::exp(log_total), log_total});
        upper = eps;
    }
    // Ratios of successive increments d_{j+1} / d_j, increments from j >= 2.
    std::vector<double> log_ratio;
    for (std::size_t j = 2; j < log_pieces.size(); ++j) {
        if (log_pieces[j - 1] == kNegInf) {
            log_ratio.push_back(kNegInf);
        } else {
            log_ratio.push_back(log_pieces[j] - log_pieces[j - 1]);
        }
    }
    const std::size_t n = log_ratio.size();
    const double r1 = log_ratio[n - 3], r2 = log_ratio[n - 2], r3 = log_ratio[n - 1];
    const double converge = std::log(0.8), stall = std::log(0.95);
    const double growth = out.probe_trace.back().log_partial_integral -
                          out.probe_trace[out.probe_trace.size() - 4].log_partial_integral;
    // Power-law rate d_j ~ j^{-q} of the last four increments, by least squares
    // in (log j, log d_j). Logarithmic singularities show up as q near 1.
    double q = kPosInf;
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        bool finite = true;
        for (int j = levels - 3; j <= levels; ++j) {
            const double ly = log_pieces[static_cast<std::size_t>(j - 1)];
            if (ly == kNegInf) finite = false;
            const double lx = std::log(static_cast<double>(j));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        if (finite) q = -(4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    }
    if (r1 <= converge && r2 <= converge && r3 <= converge) {
        out.verdict = Verdict::convergent;
        const double r = std::exp(r3);
        out.value = std::exp(log_total) + std::exp(log_pieces.back()) * r / (1.0 - r);
    } else if (q >= 1.5) {
        out.verdict = Verdict::convergent;
        const double L = levels;
        const double tail = std::exp(log_pieces.back() + q * std::log(L) + (1.0 - q) * std::log(L + 0.5)) / (q - 1.0);
        out.value = std::exp(log_total) + tail;
    } else if ((r1 >= stall && r2 >= stall && r3 >= stall) || growth >= std::log(1.5) || q <= 1.05) {
        out.verdict = Verdict::divergent;
    } else {
        out.verdict = Verdict::inconclusive;
    }
    return out;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::convergent: return "convergent";
        case Verdict::divergent: return "divergent";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

}  // namespace hardy::quadrature
