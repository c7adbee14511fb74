#pragma once

// Numerical checks of the substitution u = g v and the elementary
// inequalities behind the remainder term.

#include <optional>
#include <string>
#include <vector>

#include "hardy/inequality.hpp"

namespace hardy {

struct ElementaryConstant {
    double p = 2.0;
    std::optional<double> q;  // p >= 2 branch
    std::optional<double> M;  // 1 < p < 2 branch
    double c_estimate = 0.0;
    double argmin_X = 0.0;    // +-inf when the infimum is the limit at infinity
};

/// inf_X (|1+X|^p - 1 - pX) / |X|^q for p >= 2, q in [2, p].
ElementaryConstant elementary_lower_bound_q(double p, double q);
/// inf_X (|1+X|^p - 1 - pX) / (M^{p-2} X^2 on |X| <= M, |X|^p on |X| > M), 1 < p < 2.
ElementaryConstant elementary_lower_bound_M(double p, double M);
/// |1+X|^p - 1 - pX without cancellation near X = 0.
double elementary_numerator(double p, double X);

struct FrameNode {
    double t = 0.0;
    LogValue u, du;   // |u| and its right derivative
    LogValue v, dv;   // v = u / g
    double log_g = 0.0;
    LogValue dg;      // g'
    double log_w = 0.0, log_f = 0.0, log_F = 0.0, G = 0.0;
    double X = 0.0;
    bool in_A = true;
};

struct SubstitutionFrame {
    const TestFunction* u = nullptr;
    const TransformSet* set = nullptr;
    double M = 2.0;
    std::vector<FrameNode> nodes;  // grid nodes in [support floor, eta]
};

/// Builds v = |u| / g, X, and the A/B partition at the nodes of u.
SubstitutionFrame substitution_frame(const TestFunction& u, const TransformSet& set, double M);

enum class Identity { I413, I414, I415, I416, I417 };
const char* to_string(Identity id);

struct IdentityResidual {
    double lhs = 0.0, rhs = 0.0;
    double residual = 0.0;  // signed relative residual (lhs - rhs) / max(|lhs|, |rhs|)
    bool defined = true;
    std::string notice;
};

IdentityResidual verify_pointwise_identity(const SubstitutionFrame& frame, Identity id, std::size_t node);
/// t must be a node of the frame.
IdentityResidual verify_pointwise_identity(const SubstitutionFrame& frame, Identity id, double t);

struct IdentitySweep {
    Identity id;
    double worst_residual = 0.0;
    double worst_t = 0.0;
    int checked = 0;
    int skipped = 0;
};
std::vector<IdentitySweep> sweep_identities(const SubstitutionFrame& frame);

struct BoundaryIntegralCheck {
    double lhs = 0.0;  // sum of segment increments of |v|^p
    double rhs = 0.0;  // Lambda_p^{1/p'} |u(eta)|^p / f(eta)^{p-1}
    double residual = 0.0;
};
/// Throws PreconditionError when v does not vanish at 0+.
BoundaryIntegralCheck boundary_integral_check(const SubstitutionFrame& frame);

/// Ground-state inequality on the segments starting at masked nodes.
InequalityReport ground_state_check(const SubstitutionFrame& frame, const std::vector<bool>& node_mask,
                                    double rel_tol = 1e-6);
/// Full-interval form with the boundary term -Lambda_p^{1/p'} |u(eta)|^p / (2 mu f(eta)^{p-1}).
InequalityReport ground_state_full(const SubstitutionFrame& frame, double rel_tol = 1e-6);

/// int u^p W_p t / F^p <= K^2 int u^p W_p / (F^p G^2), admissible sets only.
InequalityReport weighted_t_bound_check(const TestFunction& u, const TransformSet& set, double K,
                                        double rel_tol = 1e-6);

/// energy >= Hardy + boundary + d(p) int |(|v|^{p/2})'|^2 F   (p >= 2), or the
/// split A/B form for 1 < p < 2.
InequalityReport assembled_remainder_check(const SubstitutionFrame& frame, double rel_tol = 1e-6);

struct PointwiseBoundResult {
    double worst_ratio = 0.0;  // max of lhs / bound over checked nodes
    int checked = 0;
    int skipped = 0;
};
/// |u'|^p W_p <= Lambda_p (1+M)^p u^p W_p / F^p on A, <= 2^p Lambda_p^{-1/p'} |v'|^p F^{p-1} on B.
PointwiseBoundResult pointwise_derivative_bound(const SubstitutionFrame& frame);

}  // namespace hardy
