#pragma once

// The transforms f, F = w f, G = mu + int_t^eta 1/F and g = (p' f)^{1/p'}
// of a weight, evaluated in log form where values can leave the double range.

#include <memory>
#include <string>
#include <vector>

#include "hardy/weights.hpp"

namespace hardy {

struct TransformParams {
    double p = 2.0;
    double eta = 1.0;
    double mu = 1.0;

    double conjugate() const { return p / (p - 1.0); }
    /// (1/p')^p
    double lambda_p() const;
    /// |1/p' - alpha|^p
    double lambda_alpha(double alpha) const;
    void validate() const;
};

/// mu that makes F(t) = t / (alpha p' - 1) for Power weights with alpha p' > 1.
double power_coupling_mu(double alpha, double p, double eta);

enum class Mode { closed_form, quadrature };
enum class ModePreference { automatic, quadrature };
enum class Which { f, F, G, g };

const char* to_string(Mode m);
const char* to_string(Which w);

class TransformSet {
public:
    const WeightSpec& spec() const { return spec_; }
    const WeightClass& weight_class() const { return class_; }
    const TransformParams& params() const { return params_; }
    Mode mode() const { return mode_; }
    /// s(w): -1 for P, +1 for Q.
    int switching_sign() const { return class_.switching_sign; }

    double log_f(double t) const;
    double log_F(double t) const;
    double G(double t) const;
    double log_g(double t) const;

    /// Same quantities at y = log t; allows t below the double range.
    double log_f_y(double y) const;
    double log_F_y(double y) const;
    double G_y(double y) const;
    double log_w_y(double y) const;

    /// log f(eta), the plateau value of f.
    double log_f_eta() const { return log_f_eta_; }

    /// Plain value; may overflow to inf or underflow to 0.
    double eval(Which which, double t) const;

    struct Cache;

private:
    friend TransformSet build_transforms(const WeightSpec&, const TransformParams&, ModePreference);
    TransformSet() = default;

    double log_f_interior(double y) const;
    double log_f_direct(double y) const;

    WeightSpec spec_;
    WeightClass class_;
    TransformParams params_;
    Mode mode_ = Mode::closed_form;
    double log_eta_ = 0.0;
    double log_f_eta_ = 0.0;
    std::shared_ptr<const Cache> cache_;
};

/// Builds the transforms and classifies the weight (including the
/// admissibility probe of sqrt(t) G(t)) for the given parameters.
TransformSet build_transforms(const WeightSpec& spec, const TransformParams& params,
                              ModePreference preference = ModePreference::automatic);

double eval_transform(const TransformSet& set, Which which, double t);

struct DerivativeCheckRow {
    double t;
    std::string identity;
    double finite_difference;
    double expected;
    double residual;  // relative to |expected|
    bool pass;
};

struct DerivativeCheckReport {
    std::vector<DerivativeCheckRow> rows;
    bool skipped = false;
    std::string notice;
    bool all_pass() const;
};

/// Compares d/dt log f = s/F, dG/dt = -1/F, d/dt log G = -1/(F G) and
/// d/dt (1/G) = 1/(F G^2) with centered finite differences.
DerivativeCheckReport check_derivative_identities(const TransformSet& set, const std::vector<double>& grid,
                                                  double tol);

}  // namespace hardy
