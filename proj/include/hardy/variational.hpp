#pragma once

// Discretized Rayleigh quotients of the Hardy inequality and their
// minimization over piecewise-linear functions on a mesh.

#include <cstdint>
#include <vector>

#include "hardy/inequality.hpp"

namespace hardy {

enum class Grading { log, geometric };

struct Mesh {
    std::vector<double> nodes;  // strictly increasing, nodes[0] = t_floor > 0, last = eta
    Grading grading = Grading::log;
    double ratio = 1.0;  // width ratio of consecutive segments for geometric grading
    std::size_t n() const { return nodes.size(); }
};

Mesh log_mesh(double t_floor, double eta, std::size_t n);
/// Smallest t_floor = target eta 10^k (k >= 0) with |log w(t_floor)| <= 200, capped at eta / 10.
double default_t_floor(const TransformSet& set, double target = 1e-6);
/// Segment widths grow by `ratio` from t_floor to eta.
Mesh geometric_mesh(double t_floor, double eta, std::size_t n, double ratio);

/// (energy - s Lambda_p^{1/p'} |u(eta)|^p / f(eta)^{p-1}) / int |u|^p W_p / F^p.
/// Throws DomainError when the denominator vanishes.
double rayleigh_quotient(const TestFunction& u, const TransformSet& set);

struct Boundary {
    enum Kind { free_at_eta, pinned } kind = free_at_eta;
    double value = 0.0;  // u(eta) when pinned
};

/// Quotient of the piecewise-linear function with nodal values u_i = exp(l_i) v_i,
/// u(t_floor) = 0. The scales l_i keep v of order one for weights whose
/// magnitudes leave the double range.
class DiscreteQuotient {
public:
    DiscreteQuotient(const TransformSet& set, const Mesh& mesh, std::vector<double> log_scale);

    std::size_t size() const { return log_scale_.size(); }
    double energy(const std::vector<double>& v) const;   // includes the boundary credit
    double hardy(const std::vector<double>& v) const;
    double value(const std::vector<double>& v) const { return energy(v) / hardy(v); }
    /// Gradients with respect to v.
    void gradients(const std::vector<double>& v, std::vector<double>& d_energy, std::vector<double>& d_hardy) const;
    std::vector<double> gradient(const std::vector<double>& v) const;
    /// Diagonal and off-diagonal of the energy Hessian (boundary credit excluded).
    void energy_hessian(const std::vector<double>& v, std::vector<double>& diag, std::vector<double>& off) const;
    void hardy_hessian(const std::vector<double>& v, std::vector<double>& diag, std::vector<double>& off) const;
    /// s Lambda_p^{1/p'} exp(p l_last) / f(eta)^{p-1}
    double boundary_coef() const { return boundary_coef_; }
    const std::vector<double>& log_scale() const { return log_scale_; }
    const Mesh& mesh() const { return mesh_; }

    struct Rule {
        std::vector<double> lambda;      // points in [0, 1]
        std::vector<double> log_weight;  // log of weight * K * width, plus p l_i
    };

private:
    const TransformSet* set_;
    Mesh mesh_;
    std::vector<double> log_scale_;
    std::vector<double> energy_coef_;  // exp(p l_i + log int W_p - p log h_i)
    std::vector<double> rho_;          // exp(l_{i+1} - l_i)
    std::vector<Rule> rules_;
    std::vector<std::vector<double>> hardy_weight_;  // exp(log_weight)
    double boundary_coef_ = 0.0;  // s Lambda^{1/p'} exp(p l_n) / f(eta)^{p-1}
    double p_ = 2.0;
};

struct MinimizationResult {
    double value = 0.0;
    TestFunction minimizer;
    std::vector<double> log_scale;  // u_i = exp(log_scale_i) v_i
    std::vector<double> v;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;
    std::string method;
};

struct MinimizeOptions {
    int max_iterations = 3000;
    double rel_change = 1e-9;
    int window = 10;
    double init_eps = 0.05;
};

MinimizationResult minimize_quotient(const TransformSet& set, const Mesh& mesh, Boundary boundary = {},
                                     const MinimizeOptions& options = {});

struct InfimumRow {
    double t_floor = 0.0;
    double minimum = 0.0;  // may underflow; see log_minimum
    double log_minimum = 0.0;
    double log_continuum_minimum = 0.0;  // (f(t_floor) - f(eta))^{1-p}
    double log_vanishing_energy = 0.0;   // vanishing family at eps_bar = t_floor
};

/// Minimal energy with u(t_floor) = 0 and u(eta) = 1 on each mesh. P class only.
std::vector<InfimumRow> infimum_zero_demo(const WeightSpec& spec, const TransformParams& params,
                                          const std::vector<Mesh>& meshes);

struct GradientCheck {
    double worst_relative_error = 0.0;
    int points = 0;
};
/// Compares the analytic gradient with central differences at random points.
GradientCheck check_gradient(const DiscreteQuotient& q, int points, std::uint64_t seed);

}  // namespace hardy
