#pragma once

// Extremal families: the near-optimal powers of f and the vanishing family
// whose energy tends to zero.

#include <memory>
#include <string>
#include <vector>

#include "hardy/inequality.hpp"

namespace hardy {

/// c * f(t)^a on (0, eta].
class PowerOfF : public Profile {
public:
    PowerOfF(const TransformSet& set, double a, double log_c = 0.0);
    PointValue at(double y) const override;

private:
    const TransformSet* set_;
    double a_;
    double log_c_;
};

/// Log-graded grid on [lo, eta] with the given density per decade; eta is the last node.
std::vector<double> log_graded_grid(double lo, double eta, int per_decade = 64);

/// u_eps = f^{1/p' + s eps}. Sampled down to 1e-6 eta, improper tail below.
/// The set must outlive the returned function.
TestFunction extremal_profile(const TransformSet& set, double eps);

struct AnalyticExtremal {
    double energy = 0.0;
    double hardy = 0.0;
    double boundary = 0.0;  // |u(eta)|^p / f(eta)^{p-1}
    double lhs = 0.0;       // energy
    double rhs = 0.0;       // Lambda_p hardy + s Lambda_p^{1/p'} boundary
    double ratio = 0.0;     // rhs / lhs
    double convexity_gap = 0.0;
};
AnalyticExtremal analytic_extremal(const TransformSet& set, double eps);

struct SharpnessRow {
    double eps = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double analytic_lhs = 0.0;
    double analytic_rhs = 0.0;
    double analytic_ratio = 0.0;
    double convexity_gap = 0.0;
    double discrepancy = 0.0;  // relative, numeric vs analytic ratio
    bool discrepancy_flag = false;
    bool analytic_only = false;
    bool exponent_warning = false;  // P class with eps >= 1/p'
    std::string notice;
};

/// eps_list positive and decreasing.
std::vector<SharpnessRow> sharpness_sweep(const TransformSet& set, const std::vector<double>& eps_list);

struct VanishingFamily {
    TestFunction profile;
    double energy = 0.0;              // by quadrature
    double energy_closed_form = 0.0;  // (f(eps_bar) - f(eta/2))^{1-p}
    double hardy = 0.0;               // by quadrature
    double hardy_lower_bound = 0.0;   // (f(eta)^{1-p} - f(eta/2)^{1-p}) / (p-1)
    double log_energy = 0.0;          // logs of the two energies, which underflow
    double log_energy_closed_form = 0.0;
};

/// P class only, eps_bar in (0, eta/2).
VanishingFamily vanishing_family(const TransformSet& set, double eps_bar);

}  // namespace hardy
