#include "hardy/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hardy/errors.hpp"
#include "hardy/quadrature.hpp"

namespace hardy {

namespace {

constexpr double kLn10 = 2.302585092994046;
constexpr double kKnotSpacing = kLn10 / 16.0;
constexpr double kKnotDecades = 12.0;
constexpr double kSingularGap = 5.0;
constexpr int kAdmissibilityOctaves = 40;
constexpr int kAdmissibilityPerOctave = 4;
constexpr double kAdmissibilityFactor = 10.0;
constexpr int kChebNodes = 16;

double chebyshev_eval(const std::vector<double>& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        const double b0 = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + 0.5 * c[0];
}

}  // namespace

struct TransformSet::Cache {
    double y_top = 0.0;
    double h = kKnotSpacing;
    // P-style: log int_{y_k}^{y_top}; Q-style: log int_{-inf}^{y_k}; y_k = y_top - k h.
    std::vector<double> log_cum;
    bool from_top = true;
    // Tables in the Q class: log int_0^eta 1/w from the divergence probe.
    bool table_total = false;
    double log_total = kNegInf;
    // Chebyshev coefficients of log F on knot interval k, filled on first use;
    // an interval that fails the accuracy check keeps the direct path.
    bool interpolate = false;
    mutable std::vector<std::vector<double>> cheb;
    mutable std::vector<char> cheb_state;  // 0 untouched, 1 interpolated, 2 direct
};

namespace {

// log(1/w(t) dt/dy) at y = log t.
double log_inverse_weight_dy(const WeightSpec& spec, double y) { return -eval_log_weight_y(spec, y) + y; }

// log int_{lo}^{hi} 1/w dt over y in [lo, hi].
double segment_log_integral(const WeightSpec& spec, double lo, double hi) {
    if (!(hi > lo)) return kNegInf;
    const quadrature::LogIntegrand f = [&spec](double y) {
        return LogValue::from_log(log_inverse_weight_dy(spec, y));
    };
    quadrature::Options options;
    const double left = log_inverse_weight_dy(spec, lo);
    const double right = log_inverse_weight_dy(spec, hi);
    if (left > right + kSingularGap) options.singular_left = true;
    if (right > left + kSingularGap) options.singular_right = true;
    const auto r = quadrature::integrate(f, lo, hi, options);
    return r.sign > 0 ? r.log_abs : kNegInf;
}

double tail_log_integral(const WeightSpec& spec, double y) {
    const quadrature::LogIntegrand f = [&spec](double yy) {
        return LogValue::from_log(log_inverse_weight_dy(spec, yy));
    };
    const auto r = quadrature::integrate_to_minus_infinity(f, y);
    if (!r.converged) throw EvaluationError("integral of 1/w towards t = 0 did not converge");
    return r.sign > 0 ? r.log_abs : kNegInf;
}

double table_floor(const WeightSpec& spec) {
    return spec.family == Family::UserTable ? spec.table->log_t.front() : kNegInf;
}

}  // namespace

double TransformParams::lambda_p() const { return std::pow(1.0 / conjugate(), p); }

double TransformParams::lambda_alpha(double alpha) const { return std::pow(std::fabs(1.0 / conjugate() - alpha), p); }

void TransformParams::validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("transforms require 1<p<\\infty");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw PreconditionError("transforms require \\eta>0");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw PreconditionError("transforms require \\mu>0");
}

double power_coupling_mu(double alpha, double p, double eta) {
    const double e = alpha * p / (p - 1.0);
    if (!(e > 1.0)) throw PreconditionError("power coupling requires \\alpha p'>1");
    return std::pow(eta, 1.0 - e) / (e - 1.0);
}

const char* to_string(Mode m) { return m == Mode::closed_form ? "closed_form" : "quadrature"; }

const char* to_string(Which w) {
    switch (w) {
        case Which::f: return "f";
        case Which::F: return "F";
        case Which::G: return "G";
        case Which::g: return "g";
    }
    return "?";
}

double TransformSet::log_f_interior(double y) const {
    const bool is_p = class_.kind == Kind::P;
    if (mode_ == Mode::closed_form) {
        const double e = spec_.family == Family::Power ? spec_.power_exponent() : 0.0;
        if (!is_p) return (1.0 - e) * y - std::log(1.0 - e);
        const double log_mu = std::log(params_.mu);
        if (std::fabs(e - 1.0) < 1e-9) return log_add_exp(log_mu, std::log(log_eta_ - y));
        const double diff = log_sub_exp((1.0 - e) * y, (1.0 - e) * log_eta_) - std::log(e - 1.0);
        return log_add_exp(log_mu, diff);
    }
    const Cache& c = *cache_;
    if (c.interpolate) {
        const std::size_t last = c.log_cum.size() - 1;
        const double y_bottom = c.y_top - static_cast<double>(last) * c.h;
        if (y > y_bottom) {
            const auto k = std::min(last - 1, static_cast<std::size_t>(std::floor((c.y_top - y) / c.h)));
            const double hi = c.y_top - static_cast<double>(k) * c.h, lo = hi - c.h;
            if (c.cheb_state[k] == 0) {
                std::vector<double> values(kChebNodes), coef(kChebNodes, 0.0);
                for (int j = 0; j < kChebNodes; ++j) {
                    const double x = std::cos(std::numbers::pi * (j + 0.5) / kChebNodes);
                    const double yy = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                    values[j] = log_f_direct(yy) + log_w_y(yy);
                }
                for (int m = 0; m < kChebNodes; ++m) {
                    double sum = 0.0;
                    for (int j = 0; j < kChebNodes; ++j) sum += values[j] * std::cos(std::numbers::pi * m * (j + 0.5) / kChebNodes);
                    coef[m] = 2.0 * sum / kChebNodes;
                }
                bool ok = std::isfinite(coef[0]);
                for (const double x : {-0.93, -0.41, 0.17, 0.71}) {
                    const double yy = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                    const double exact = log_f_direct(yy) + log_w_y(yy);
                    // exact values carry rounding of order eps |log w|
                    const double noise = 64.0 * 2.220446049250313e-16 * std::fabs(log_w_y(yy));
                    const double tol = 1e-13 * std::max(1.0, std::fabs(exact)) + noise;
                    if (!(std::fabs(chebyshev_eval(coef, x) - exact) <= tol)) ok = false;
                }
                c.cheb[k] = std::move(coef);
                c.cheb_state[k] = ok ? 1 : 2;
            }
            if (c.cheb_state[k] == 1) {
                const double x = (2.0 * y - lo - hi) / (hi - lo);
                return chebyshev_eval(c.cheb[k], x) - log_w_y(y);
            }
        }
    }
    return log_f_direct(y);
}

double TransformSet::log_f_direct(double y) const {
    const bool is_p = class_.kind == Kind::P;
    const Cache& c = *cache_;
    const std::size_t last = c.log_cum.size() - 1;
    const double y_bottom = c.y_top - static_cast<double>(last) * c.h;
    if (y < table_floor(spec_)) {
        std::ostringstream msg;
        msg << "transform queried at t = " << std::exp(y) << " below the weight table";
        throw ExtrapolationError(msg.str());
    }
    if (c.from_top) {
        double log_int;
        if (y <= y_bottom) {
            log_int = log_add_exp(c.log_cum[last], segment_log_integral(spec_, y, y_bottom));
        } else {
            const auto k = static_cast<std::size_t>(std::floor((c.y_top - y) / c.h));
            const double yk = c.y_top - static_cast<double>(k) * c.h;
            log_int = log_add_exp(c.log_cum[k], segment_log_integral(spec_, y, yk));
        }
        if (is_p) return log_add_exp(std::log(params_.mu), log_int);
        if (!(log_int < c.log_total)) throw EvaluationError("tabulated weight: partial integral exceeds total");
        return log_sub_exp(c.log_total, log_int);
    }
    if (y <= y_bottom) return tail_log_integral(spec_, y);
    const auto k = static_cast<std::size_t>(std::ceil((c.y_top - y) / c.h));
    const std::size_t kk = std::min(k, last);
    const double yk = c.y_top - static_cast<double>(kk) * c.h;
    return log_add_exp(c.log_cum[kk], segment_log_integral(spec_, yk, y));
}

double TransformSet::log_f_y(double y) const {
    if (std::isnan(y)) throw DomainError("transform evaluated at NaN");
    if (y >= log_eta_) return log_f_eta_;
    return log_f_interior(y);
}

double TransformSet::log_w_y(double y) const { return eval_log_weight_y(spec_, y); }

double TransformSet::log_F_y(double y) const { return log_w_y(y) + log_f_y(y); }

double TransformSet::G_y(double y) const {
    if (y >= log_eta_) return params_.mu;
    const double lf = log_f_y(y);
    if (class_.kind == Kind::P) return lf - std::log(params_.mu) + params_.mu;
    return log_f_eta_ - lf + params_.mu;
}

namespace {
double checked_log(double t) {
    if (!(t > 0.0)) throw DomainError("transforms require t > 0");
    return std::log(t);
}
}  // namespace

double TransformSet::log_f(double t) const { return log_f_y(checked_log(t)); }
double TransformSet::log_F(double t) const { return log_F_y(checked_log(t)); }
double TransformSet::G(double t) const { return G_y(checked_log(t)); }
double TransformSet::log_g(double t) const {
    const double pc = params_.conjugate();
    return (std::log(pc) + log_f(t)) / pc;
}

double TransformSet::eval(Which which, double t) const {
    switch (which) {
        case Which::f: return std::exp(log_f(t));
        case Which::F: return std::exp(log_F(t));
        case Which::G: return G(t);
        case Which::g: return std::exp(log_g(t));
    }
    return 0.0;
}

double eval_transform(const TransformSet& set, Which which, double t) { return set.eval(which, t); }

TransformSet build_transforms(const WeightSpec& spec, const TransformParams& params, ModePreference preference) {
    params.validate();
    if (std::fabs(spec.p - params.p) > 1e-12 * params.p) {
        throw PreconditionError("weight and transform parameters disagree on p");
    }
    TransformSet set;
    set.spec_ = spec;
    set.params_ = params;
    set.log_eta_ = std::log(params.eta);
    const Kind kind = classify_kind(spec, params.eta);
    set.class_.kind = kind;
    set.class_.switching_sign = kind == Kind::P ? -1 : 1;
    set.class_.limit_at_zero = limit_at_zero(spec, kind, &set.class_.limit_value);

    const bool closed = (spec.family == Family::Power || spec.family == Family::Constant) &&
                        preference == ModePreference::automatic;
    set.mode_ = closed ? Mode::closed_form : Mode::quadrature;

    if (!closed) {
        auto cache = std::make_shared<TransformSet::Cache>();
        cache->y_top = set.log_eta_;
        double y_bottom = set.log_eta_ - kKnotDecades * kLn10;
        const bool table = spec.family == Family::UserTable;
        if (table) {
            if (set.log_eta_ > spec.table->log_t.back()) {
                throw ExtrapolationError("eta lies beyond the weight table");
            }
            y_bottom = std::max(y_bottom, spec.table->log_t.front());
        }
        const int segments = std::max(1, static_cast<int>(std::ceil((set.log_eta_ - y_bottom) / kKnotSpacing)));
        cache->h = (set.log_eta_ - y_bottom) / segments;
        cache->from_top = kind == Kind::P || table;
        cache->log_cum.assign(static_cast<std::size_t>(segments) + 1, kNegInf);
        if (cache->from_top) {
            for (int k = 1; k <= segments; ++k) {
                const double hi = cache->y_top - (k - 1) * cache->h;
                const double lo = cache->y_top - k * cache->h;
                cache->log_cum[k] = log_add_exp(cache->log_cum[k - 1], segment_log_integral(spec, lo, hi));
            }
            if (kind == Kind::Q) {
                const quadrature::LogIntegrand inverse = [&spec](double t) {
                    return LogValue::from_log(-eval_log_weight(spec, t));
                };
                const double lo = std::exp(spec.table->log_t.front());
                const int levels = std::min(12, static_cast<int>(std::floor(std::log(params.eta / lo) / std::log(4.0))));
                const auto probe = quadrature::probe_divergence(inverse, params.eta, levels);
                cache->table_total = true;
                cache->log_total = std::log(probe.value);
            }
        } else {
            cache->log_cum[segments] = tail_log_integral(spec, y_bottom);
            for (int k = segments - 1; k >= 0; --k) {
                const double hi = cache->y_top - k * cache->h;
                const double lo = cache->y_top - (k + 1) * cache->h;
                cache->log_cum[k] = log_add_exp(cache->log_cum[k + 1], segment_log_integral(spec, lo, hi));
            }
        }
        cache->interpolate = !table && segments >= 1;
        cache->cheb.assign(static_cast<std::size_t>(segments), {});
        cache->cheb_state.assign(static_cast<std::size_t>(segments), 0);
        set.cache_ = std::move(cache);
    }

    if (kind == Kind::P) {
        set.log_f_eta_ = std::log(params.mu);
    } else if (set.mode_ == Mode::quadrature) {
        set.log_f_eta_ = set.cache_->table_total ? set.cache_->log_total : set.cache_->log_cum[0];
    } else {
        set.log_f_eta_ = set.log_f_interior(set.log_eta_);
    }

    // Admissibility: sqrt(t) G(t) on a geometric grid below eta.
    const double y_floor = table_floor(spec);
    const double step = std::log(2.0) / kAdmissibilityPerOctave;
    const double reference = std::exp(0.5 * (set.log_eta_ - std::log(2.0))) * set.G_y(set.log_eta_ - std::log(2.0));
    double largest = 0.0;
    bool admissible = true;
    for (int j = 1; j <= kAdmissibilityOctaves * kAdmissibilityPerOctave; ++j) {
        const double y = set.log_eta_ - j * step;
        if (y < y_floor) break;
        const double value = std::exp(0.5 * y) * set.G_y(y);
        largest = std::max(largest, value);
        if (value > kAdmissibilityFactor * reference) {
            admissible = false;
            set.class_.first_violation_t = std::exp(y);
            break;
        }
    }
    set.class_.admissible = admissible;
    if (admissible) set.class_.admissibility_constant_K = 1.01 * largest;
    return set;
}

WeightClass classify(const WeightSpec& spec, double eta) {
    TransformParams params;
    params.p = spec.p;
    params.eta = eta;
    params.mu = 1.0;
    return build_transforms(spec, params).weight_class();
}

Admissibility check_admissible(const WeightSpec& spec, double eta) {
    const WeightClass c = classify(spec, eta);
    return {c.admissible, c.admissibility_constant_K, c.first_violation_t};
}

bool DerivativeCheckReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const DerivativeCheckRow& r) { return r.pass; });
}

DerivativeCheckReport check_derivative_identities(const TransformSet& set, const std::vector<double>& grid,
                                                  double tol) {
    DerivativeCheckReport report;
    if (set.spec().family == Family::UserTable) {
        report.skipped = true;
        report.notice = "derivative identities skipped: tabulated weights are not certified C^1";
        return report;
    }
    const double eta = set.params().eta;
    const int s = set.switching_sign();
    for (const double t : grid) {
        if (!(t > 0.0) || !(t < eta)) continue;
        const double h = std::min(1e-3 * t, (eta - t) / 3.0);
        auto derivative = [&](auto&& phi) {
            return (-phi(t + 2 * h) + 8 * phi(t + h) - 8 * phi(t - h) + phi(t - 2 * h)) / (12 * h);
        };
        const double inv_F = std::exp(-set.log_F(t));
        const double G = set.G(t);
        auto add = [&](const char* name, double fd, double expected) {
            const double residual = std::fabs(fd - expected) / std::max(std::fabs(expected), 1e-300);
            report.rows.push_back({t, name, fd, expected, residual, residual <= tol});
        };
        add("dlogf/dt = s/F", derivative([&](double x) { return set.log_f(x); }), s * inv_F);
        add("dG/dt = -1/F", derivative([&](double x) { return set.G(x); }), -inv_F);
        add("dlogG/dt = -1/(FG)", derivative([&](double x) { return std::log(set.G(x)); }), -inv_F / G);
        add("d(1/G)/dt = 1/(FG^2)", derivative([&](double x) { return 1.0 / set.G(x); }), inv_F / (G * G));
    }
    return report;
}

}  // namespace hardy
