#include "hardy/extremals.hpp"

#include <algorithm>
#include <cmath>

#include "hardy/errors.hpp"

namespace hardy {
namespace {

// (f(eps_bar) - f(t)) / (f(eps_bar) - f(eta/2)) between eps_bar and eta/2, 1 above.
class VanishingRamp : public Profile {
public:
    VanishingRamp(const TransformSet& set, double eps_bar)
        : set_(&set),
          half_(0.5 * set.params().eta),
          log_f_bar_(set.log_f(eps_bar)),
          log_delta_(log_sub_exp(log_f_bar_, set.log_f(half_))) {}

    PointValue at(double y) const override {
        const double t = std::exp(y);
        if (t >= half_) return {LogValue{0.0, 1}, LogValue{}};
        const double lf = set_->log_f_y(y);
        const double lw = set_->log_w_y(y);
        const double lu = log_sub_exp(log_f_bar_, lf);
        return {LogValue::from_log(lu - log_delta_), LogValue{-lw - log_delta_, 1}};
    }

    double log_delta() const { return log_delta_; }

private:
    const TransformSet* set_;
    double half_;
    double log_f_bar_;
    double log_delta_;
};

double log_gap(double a, double b) {
    if (a == 0.0 && b == 0.0) return 0.0;
    if (a == 0.0 || b == 0.0 || (a > 0) != (b > 0)) return 1.0;
    return -std::expm1(-std::fabs(std::log(std::fabs(a)) - std::log(std::fabs(b))));
}

}  // namespace

PowerOfF::PowerOfF(const TransformSet& set, double a, double log_c) : set_(&set), a_(a), log_c_(log_c) {}

PointValue PowerOfF::at(double y) const {
    const double lf = set_->log_f_y(y);
    const double lF = set_->log_F_y(y);
    if (a_ == 0.0) return {LogValue{log_c_, 1}, LogValue{}};
    // |u'| = |a| f^a / F, u' has the sign of s a
    const int sign = set_->switching_sign() * (a_ > 0.0 ? 1 : -1);
    return {LogValue{log_c_ + a_ * lf, 1}, LogValue{log_c_ + std::log(std::fabs(a_)) + a_ * lf - lF, sign}};
}

std::vector<double> log_graded_grid(double lo, double eta, int per_decade) {
    if (!(lo > 0.0) || !(lo < eta)) throw PreconditionError("log-graded grid requires 0 < lo < eta");
    const int n = std::max(2, static_cast<int>(std::ceil(std::log10(eta / lo) * per_decade)) + 1);
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(eta / lo, static_cast<double>(i) / (n - 1));
    g.front() = lo;
    g.back() = eta;
    return g;
}

TestFunction extremal_profile(const TransformSet& set, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("extremal profile requires \\varepsilon>0");
    const double pc = set.params().conjugate();
    const double a = 1.0 / pc + set.switching_sign() * eps;
    const double eta = set.params().eta;
    TestFunction u = TestFunction::from_profile(std::make_shared<PowerOfF>(set, a), log_graded_grid(1e-6 * eta, eta), 0.0);
    u.name = "u_eps(" + std::to_string(eps) + ")";
    return u;
}

AnalyticExtremal analytic_extremal(const TransformSet& set, double eps) {
    if (!(eps > 0.0)) throw PreconditionError("extremal profile requires \\varepsilon>0");
    const TransformParams& tp = set.params();
    const double p = tp.p, pc = tp.conjugate();
    const int s = set.switching_sign();
    const double a = 1.0 / pc + s * eps;
    const double lam = tp.lambda_p(), lam_b = std::pow(lam, 1.0 / pc);
    AnalyticExtremal out;
    const double boundary = std::exp(s * eps * p * set.log_f_eta());
    const double j = boundary / (p * eps);
    out.energy = std::pow(std::fabs(a), p) * j;
    out.hardy = j;
    out.boundary = boundary;
    out.lhs = out.energy;
    out.rhs = lam * j + s * lam_b * boundary;
    out.ratio = (lam + s * lam_b * p * eps) / std::pow(std::fabs(a), p);
    out.convexity_gap = std::pow(std::fabs(a), p) - lam - s * lam_b * p * eps;
    return out;
}

std::vector<SharpnessRow> sharpness_sweep(const TransformSet& set, const std::vector<double>& eps_list) {
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw PreconditionError("sharpness sweep requires \\varepsilon>0");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
            throw PreconditionError("sharpness sweep requires a decreasing \\varepsilon list");
        }
    }
    const double pc = set.params().conjugate();
    std::vector<SharpnessRow> rows;
    for (const double eps : eps_list) {
        SharpnessRow row;
        row.eps = eps;
        const AnalyticExtremal an = analytic_extremal(set, eps);
        row.analytic_lhs = an.lhs;
        row.analytic_rhs = an.rhs;
        row.analytic_ratio = an.ratio;
        row.convexity_gap = an.convexity_gap;
        row.exponent_warning = set.weight_class().kind == Kind::P && eps >= 1.0 / pc;
        try {
            const TestFunction u = extremal_profile(set, eps);
            const InequalityReport r = report_nct1(u, set);
            row.ratio = r.rhs / r.lhs;
            row.lhs = r.lhs * std::exp(r.log_scale);
            row.rhs = r.rhs * std::exp(r.log_scale);
            row.discrepancy = std::max(log_gap(row.lhs, an.lhs), log_gap(row.rhs, an.rhs));
            row.discrepancy = std::max(row.discrepancy, std::fabs(row.ratio - an.ratio) / an.ratio);
            row.discrepancy_flag = row.discrepancy > 1e-4;
        } catch (const std::exception& e) {
            row.analytic_only = true;
            row.notice = e.what();
            row.lhs = an.lhs;
            row.rhs = an.rhs;
            row.ratio = an.ratio;
        }
        rows.push_back(row);
    }
    return rows;
}

VanishingFamily vanishing_family(const TransformSet& set, double eps_bar) {
    if (set.weight_class().kind != Kind::P) {
        throw PreconditionError("the vanishing family requires a P-class weight, w\\in P(R_+)");
    }
    const TransformParams& tp = set.params();
    const double eta = tp.eta, p = tp.p;
    if (!(eps_bar > 0.0 && eps_bar < 0.5 * eta)) {
        throw PreconditionError("the vanishing family requires 0<\\bar\\varepsilon<\\eta/2");
    }
    auto ramp = std::make_shared<VanishingRamp>(set, eps_bar);
    std::vector<double> grid = log_graded_grid(eps_bar, 0.5 * eta);
    grid.push_back(eta);
    VanishingFamily out{TestFunction::from_profile(ramp, grid, eps_bar)};
    out.profile.name = "phi(" + std::to_string(eps_bar) + ")";
    const auto e = out.profile.integrate([&set, p](double y, const PointValue& v) {
        if (v.du.is_zero()) return LogValue{};
        return LogValue{p * v.du.log_abs + (p - 1.0) * set.log_w_y(y), 1};
    });
    out.log_energy = e.log_abs;
    out.energy = e.value;
    out.log_energy_closed_form = (1.0 - p) * ramp->log_delta();
    out.energy_closed_form = std::exp(out.log_energy_closed_form);
    out.hardy = hardy_integral(out.profile, set);
    out.hardy_lower_bound =
        (std::exp((1.0 - p) * set.log_f_eta()) - std::exp((1.0 - p) * set.log_f(0.5 * eta))) / (p - 1.0);
    return out;
}

}  // namespace hardy
