#pragma once

// Weight functions w(t) > 0 on (0, inf), evaluated as log w.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hardy {

enum class Family { Power, ExpInvPow, PowerTimesExp, Constant, UserTable };

/// Samples of log w on a strictly increasing grid of t > 0, interpolated
/// linearly in (log t, log w).
struct WeightTable {
    std::vector<double> log_t;
    std::vector<double> log_w;
};

struct WeightSpec {
    Family family = Family::Constant;
    double p = 2.0;
    double alpha = 0.0;  // Power, PowerTimesExp: w contains t^{alpha p'}
    int sign = 1;        // ExpInvPow, PowerTimesExp: w contains exp(sign t^{-beta})
    double beta = 1.0;
    std::shared_ptr<const WeightTable> table;
    std::string name;

    static WeightSpec power(double alpha, double p);
    static WeightSpec exp_inv_pow(int sign, double beta, double p);
    static WeightSpec power_times_exp(double alpha, int sign, double beta, double p);
    static WeightSpec constant(double p);
    /// Rows are (t, log w).
    static WeightSpec user_table(const std::vector<std::pair<double, double>>& rows, double p);

    double conjugate() const { return p / (p - 1.0); }
    /// Exponent of the power factor, alpha p'.
    double power_exponent() const { return alpha * conjugate(); }
    std::string describe() const;
};

/// log w(t). Throws DomainError for t <= 0 and ExtrapolationError outside a table.
double eval_log_weight(const WeightSpec& spec, double t);
/// log w(e^y), evaluated without forming t.
double eval_log_weight_y(const WeightSpec& spec, double y);
/// d log w / d log t at y = log t.
double log_weight_slope_y(const WeightSpec& spec, double y);
/// log W_p(t) = (p - 1) log w(t).
double eval_log_wp(const WeightSpec& spec, double t);

enum class Kind { P, Q };
enum class LimitAtZero { zero, finite, infinite };

struct WeightClass {
    Kind kind = Kind::Q;
    bool admissible = false;
    std::optional<double> admissibility_constant_K;
    int switching_sign = 1;
    LimitAtZero limit_at_zero = LimitAtZero::finite;
    double limit_value = 1.0;  // meaningful when limit_at_zero == finite
    std::optional<double> first_violation_t;
};

const char* to_string(Kind k);
const char* to_string(LimitAtZero l);

/// P/Q verdict only: analytic for built-in families, probed for tables.
/// Throws InconclusiveError when the probe cannot decide.
Kind classify_kind(const WeightSpec& spec, double eta);
LimitAtZero limit_at_zero(const WeightSpec& spec, Kind kind, double* value = nullptr);

/// Full classification including admissibility (builds transforms with mu = 1).
WeightClass classify(const WeightSpec& spec, double eta);

struct Admissibility {
    bool admissible = false;
    std::optional<double> K;
    std::optional<double> first_violation_t;
};
Admissibility check_admissible(const WeightSpec& spec, double eta);

/// Built-in catalog: constant, t^2, e^{-1/t}, e^{1/t}, e^{-1/sqrt t},
/// e^{1/sqrt t}, t^2 e^{-1/t}, t^2 e^{1/t}.
std::vector<WeightSpec> builtin_weights(double p);
/// w = t^2, i.e. Power with alpha = 2 / p'.
WeightSpec t_squared(double p);

}  // namespace hardy
