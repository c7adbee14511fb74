#include "hardy/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hardy/errors.hpp"
#include "hardy/quadrature.hpp"

namespace hardy {
namespace {

void require_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("weight requires 1<p<\\infty");
}

void require_exp_params(int sign, double beta) {
    if (sign != 1 && sign != -1) throw PreconditionError("exponential weight sign must be +1 or -1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionError("exponential weight requires beta > 0");
}

std::string format_number(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

double table_log_weight(const WeightTable& table, double y) {
    const auto& xs = table.log_t;
    if (y < xs.front() || y > xs.back()) {
        std::ostringstream msg;
        msg << "weight table queried at t = " << std::exp(y) << " outside [" << std::exp(xs.front()) << ", "
            << std::exp(xs.back()) << "]";
        throw ExtrapolationError(msg.str());
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), y);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    if (hi >= xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    const double frac = (y - xs[lo]) / (xs[hi] - xs[lo]);
    return table.log_w[lo] + frac * (table.log_w[hi] - table.log_w[lo]);
}

double table_slope(const WeightTable& table, double y) {
    const auto& xs = table.log_t;
    if (y < xs.front() || y > xs.back()) throw ExtrapolationError("weight table slope queried outside grid");
    auto it = std::upper_bound(xs.begin(), xs.end(), y);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    if (hi >= xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    return (table.log_w[hi] - table.log_w[lo]) / (xs[hi] - xs[lo]);
}

}  // namespace

WeightSpec WeightSpec::power(double alpha, double p) {
    require_p(p);
    if (!std::isfinite(alpha)) throw PreconditionError("power weight requires finite alpha");
    WeightSpec s;
    s.family = Family::Power;
    s.p = p;
    s.alpha = alpha;
    s.name = "power";
    return s;
}

WeightSpec WeightSpec::exp_inv_pow(int sign, double beta, double p) {
    require_p(p);
    require_exp_params(sign, beta);
    WeightSpec s;
    s.family = Family::ExpInvPow;
    s.p = p;
    s.sign = sign;
    s.beta = beta;
    s.name = "exp_inv_pow";
    return s;
}

WeightSpec WeightSpec::power_times_exp(double alpha, int sign, double beta, double p) {
    require_p(p);
    require_exp_params(sign, beta);
    if (!std::isfinite(alpha)) throw PreconditionError("power weight requires finite alpha");
    WeightSpec s;
    s.family = Family::PowerTimesExp;
    s.p = p;
    s.alpha = alpha;
    s.sign = sign;
    s.beta = beta;
    s.name = "power_times_exp";
    return s;
}

WeightSpec WeightSpec::constant(double p) {
    require_p(p);
    WeightSpec s;
    s.family = Family::Constant;
    s.p = p;
    s.name = "constant";
    return s;
}

WeightSpec WeightSpec::user_table(const std::vector<std::pair<double, double>>& rows, double p) {
    require_p(p);
    if (rows.size() < 2) throw PreconditionError("weight table needs at least two rows");
    auto table = std::make_shared<WeightTable>();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto [t, lw] = rows[i];
        if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("weight table requires t > 0");
        if (!std::isfinite(lw)) throw PreconditionError("weight table requires finite log w (w > 0)");
        if (i > 0 && !(t > rows[i - 1].first)) throw PreconditionError("weight table t must be strictly increasing");
        table->log_t.push_back(std::log(t));
        table->log_w.push_back(lw);
    }
    WeightSpec s;
    s.family = Family::UserTable;
    s.p = p;
    s.table = std::move(table);
    s.name = "table";
    return s;
}

std::string WeightSpec::describe() const {
    const std::string e = format_number(power_exponent());
    const std::string expo = std::string(sign > 0 ? "exp(" : "exp(-") + "t^-" + format_number(beta) + ")";
    switch (family) {
        case Family::Power: return "t^" + e;
        case Family::ExpInvPow: return expo;
        case Family::PowerTimesExp: return "t^" + e + " " + expo;
        case Family::Constant: return "1";
        case Family::UserTable: return "table(" + std::to_string(table ? table->log_t.size() : 0) + " rows)";
    }
    return "?";
}

double eval_log_weight_y(const WeightSpec& spec, double y) {
    if (std::isnan(y)) throw DomainError("weight evaluated at NaN");
    switch (spec.family) {
        case Family::Power: return spec.power_exponent() * y;
        case Family::ExpInvPow: return spec.sign * std::exp(-spec.beta * y);
        case Family::PowerTimesExp: return spec.power_exponent() * y + spec.sign * std::exp(-spec.beta * y);
        case Family::Constant: return 0.0;
        case Family::UserTable: return table_log_weight(*spec.table, y);
    }
    return 0.0;
}

double eval_log_weight(const WeightSpec& spec, double t) {
    if (!(t > 0.0)) throw DomainError("weight requires t > 0");
    return eval_log_weight_y(spec, std::log(t));
}

double log_weight_slope_y(const WeightSpec& spec, double y) {
    switch (spec.family) {
        case Family::Power: return spec.power_exponent();
        case Family::ExpInvPow: return -spec.beta * spec.sign * std::exp(-spec.beta * y);
        case Family::PowerTimesExp: return spec.power_exponent() - spec.beta * spec.sign * std::exp(-spec.beta * y);
        case Family::Constant: return 0.0;
        case Family::UserTable: return table_slope(*spec.table, y);
    }
    return 0.0;
}

double eval_log_wp(const WeightSpec& spec, double t) { return (spec.p - 1.0) * eval_log_weight(spec, t); }

const char* to_string(Kind k) { return k == Kind::P ? "P" : "Q"; }

const char* to_string(LimitAtZero l) {
    switch (l) {
        case LimitAtZero::zero: return "zero";
        case LimitAtZero::finite: return "finite";
        case LimitAtZero::infinite: return "infinite";
    }
    return "?";
}

Kind classify_kind(const WeightSpec& spec, double eta) {
    if (!(eta > 0.0)) throw DomainError("classify requires eta > 0");
    switch (spec.family) {
        case Family::Power: return spec.power_exponent() >= 1.0 - 1e-12 ? Kind::P : Kind::Q;
        case Family::ExpInvPow:
        case Family::PowerTimesExp: return spec.sign < 0 ? Kind::P : Kind::Q;
        case Family::Constant: return Kind::Q;
        case Family::UserTable: break;
    }
    const double lo = std::exp(spec.table->log_t.front());
    const int levels = std::min(12, static_cast<int>(std::floor(std::log(eta / lo) / std::log(4.0))));
    if (levels < 5) {
        throw InconclusiveError("weight table does not reach far enough below eta to probe integrability of 1/w");
    }
    const quadrature::LogIntegrand inverse = [&spec](double t) {
        return LogValue::from_log(-eval_log_weight(spec, t));
    };
    const auto verdict = quadrature::probe_divergence(inverse, eta, levels);
    if (verdict.verdict == quadrature::Verdict::inconclusive) {
        throw InconclusiveError("integrability of 1/w near 0 is inconclusive at probe depth " +
                                std::to_string(levels));
    }
    return verdict.verdict == quadrature::Verdict::divergent ? Kind::P : Kind::Q;
}

LimitAtZero limit_at_zero(const WeightSpec& spec, Kind kind, double* value) {
    auto finite = [value](double v) {
        if (value) *value = v;
        return LimitAtZero::finite;
    };
    if (value) *value = 0.0;
    if (kind == Kind::P) return LimitAtZero::zero;
    switch (spec.family) {
        case Family::Power: {
            const double e = spec.power_exponent();
            if (e > 0.0) return LimitAtZero::zero;
            if (e < 0.0) return LimitAtZero::infinite;
            return finite(1.0);
        }
        case Family::ExpInvPow:
        case Family::PowerTimesExp: return spec.sign < 0 ? LimitAtZero::zero : LimitAtZero::infinite;
        case Family::Constant: return finite(1.0);
        case Family::UserTable: {
            const double lw = spec.table->log_w.front();
            if (lw < -30.0) return LimitAtZero::zero;
            if (lw > 30.0) return LimitAtZero::infinite;
            return finite(std::exp(lw));
        }
    }
    return LimitAtZero::finite;
}

WeightSpec t_squared(double p) {
    WeightSpec s = WeightSpec::power(2.0 / (p / (p - 1.0)), p);
    s.name = "t^2";
    return s;
}

std::vector<WeightSpec> builtin_weights(double p) {
    auto named = [](WeightSpec s, const char* name) {
        s.name = name;
        return s;
    };
    return {
        named(WeightSpec::constant(p), "1"),
        t_squared(p),
        named(WeightSpec::exp_inv_pow(-1, 1.0, p), "exp(-1/t)"),
        named(WeightSpec::exp_inv_pow(1, 1.0, p), "exp(1/t)"),
        named(WeightSpec::exp_inv_pow(-1, 0.5, p), "exp(-1/sqrt(t))"),
        named(WeightSpec::exp_inv_pow(1, 0.5, p), "exp(1/sqrt(t))"),
        named(WeightSpec::power_times_exp(2.0 * (p - 1.0) / p, -1, 1.0, p), "t^2 exp(-1/t)"),
        named(WeightSpec::power_times_exp(2.0 * (p - 1.0) / p, 1, 1.0, p), "t^2 exp(1/t)"),
    };
}

}  // namespace hardy
