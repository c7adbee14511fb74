#include "hardy/inequality.hpp"

#include <algorithm>
#include <cmath>

#include "hardy/errors.hpp"
#include "hardy/identities.hpp"

namespace hardy {
namespace {

LogValue checked(const quadrature::QuadratureResult& r, const char* what) {
    if (std::isnan(r.log_abs) || r.log_abs == kPosInf) {
        throw DivergenceError(std::string(what) + " integral is not finite");
    }
    return r.log_value();
}

LogDensity energy_density(const TransformSet& set, double extra_log_t = 0.0) {
    const double p = set.params().p;
    return [&set, p, extra_log_t](double y, const PointValue& v) {
        if (v.du.is_zero()) return LogValue{};
        return LogValue{p * v.du.log_abs + (p - 1.0) * set.log_w_y(y) + extra_log_t * y, 1};
    };
}

// |u|^p W_p / F^p, optionally divided by G^{g_power} and multiplied by t^{extra}.
LogDensity potential_density(const TransformSet& set, int g_power, double extra_log_t = 0.0) {
    const double p = set.params().p;
    return [&set, p, g_power, extra_log_t](double y, const PointValue& v) {
        if (v.u.is_zero()) return LogValue{};
        double l = p * v.u.log_abs - set.log_w_y(y) - p * set.log_f_y(y) + extra_log_t * y;
        if (g_power != 0) l -= g_power * std::log(set.G_y(y));
        return LogValue{l, 1};
    };
}

LogValue boundary_term(const TestFunction& u, const TransformSet& set) {
    const LogValue b = u.boundary_log();
    if (b.is_zero()) return {};
    const double p = set.params().p;
    return {p * b.log_abs - (p - 1.0) * set.log_f_eta(), 1};
}

LogValue abs_boundary_power(const TestFunction& u, double p) {
    const LogValue b = u.boundary_log();
    return b.is_zero() ? LogValue{} : LogValue{p * b.log_abs, 1};
}

LogValue constant(double c) { return LogValue::from_double(c); }

void add_flags(InequalityReport& r, const TestFunction& u) {
    if (u.improper_tail()) r.flags.push_back("improper-tail");
}

}  // namespace

double InequalityReport::term(const std::string& name) const {
    for (const auto& [k, v] : lhs_terms) {
        if (k == name) return v;
    }
    for (const auto& [k, v] : rhs_terms) {
        if (k == name) return v;
    }
    throw DomainError("report has no term named " + name);
}

InequalityReport make_report(std::string id, TermList lhs, TermList rhs, double rel_tol) {
    InequalityReport r;
    r.inequality_id = std::move(id);
    r.lhs_terms = std::move(lhs);
    r.rhs_terms = std::move(rhs);
    for (const auto& t : r.lhs_terms) r.lhs += t.second;
    for (const auto& t : r.rhs_terms) r.rhs += t.second;
    r.slack = r.lhs - r.rhs;
    r.tolerance_used = rel_tol * std::max({std::fabs(r.lhs), std::fabs(r.rhs), 1.0});
    r.pass = r.slack >= -r.tolerance_used;
    return r;
}

double common_log_scale(const std::vector<LogValue>& values) {
    double top = kNegInf;
    for (const LogValue& v : values) {
        if (!v.is_zero() && std::isfinite(v.log_abs)) top = std::max(top, v.log_abs);
    }
    return top > 600.0 ? top : 0.0;
}

InequalityReport make_log_report(std::string id, const LogTermList& lhs, const LogTermList& rhs, double rel_tol) {
    std::vector<LogValue> all;
    for (const auto& t : lhs) all.push_back(t.second);
    for (const auto& t : rhs) all.push_back(t.second);
    const double scale = common_log_scale(all);
    auto convert = [scale](const LogTermList& in) {
        TermList out;
        for (const auto& [k, v] : in) out.emplace_back(k, v.is_zero() ? 0.0 : v.sign * std::exp(v.log_abs - scale));
        return out;
    };
    InequalityReport r = make_report(std::move(id), convert(lhs), convert(rhs), rel_tol);
    r.log_scale = scale;
    if (scale != 0.0) r.flags.push_back("scaled by exp(-" + std::to_string(scale) + ")");
    return r;
}

double energy(const TestFunction& u, const TransformSet& set) {
    return checked(u.integrate(energy_density(set)), "energy").to_double();
}

double hardy_integral(const TestFunction& u, const TransformSet& set) {
    return checked(u.integrate(potential_density(set, 0)), "Hardy").to_double();
}

double remainder_integral(const TestFunction& u, const TransformSet& set) {
    return checked(u.integrate(potential_density(set, 2)), "remainder").to_double();
}

HardyTerms hardy_terms(const TestFunction& u, const TransformSet& set, bool with_remainder) {
    if (std::fabs(u.eta() - set.params().eta) > 1e-12 * set.params().eta) {
        throw PreconditionError("test function and transforms use different eta");
    }
    const LogValue e = checked(u.integrate(energy_density(set)), "energy");
    const LogValue h = checked(u.integrate(potential_density(set, 0)), "Hardy");
    const LogValue r = with_remainder ? checked(u.integrate(potential_density(set, 2)), "remainder") : LogValue{};
    const LogValue b = boundary_term(u, set);
    HardyTerms t;
    t.log_scale = common_log_scale({e, h, r, b});
    auto scaled = [&t](const LogValue& v) { return v.is_zero() ? 0.0 : v.sign * std::exp(v.log_abs - t.log_scale); };
    t.energy = scaled(e);
    t.hardy = scaled(h);
    t.remainder = scaled(r);
    t.boundary = scaled(b);
    t.improper_tail = u.improper_tail();
    return t;
}

namespace {

void carry_scale(InequalityReport& r, const HardyTerms& terms) {
    r.log_scale = terms.log_scale;
    if (terms.log_scale != 0.0) r.flags.push_back("scaled by exp(-" + std::to_string(terms.log_scale) + ")");
    if (terms.improper_tail) r.flags.push_back("improper-tail");
}

}  // namespace

InequalityReport report_nct1(const HardyTerms& terms, const TransformSet& set, double rel_tol) {
    const TransformParams& tp = set.params();
    const double lam = tp.lambda_p();
    const double lam_b = std::pow(lam, 1.0 / tp.conjugate());
    InequalityReport r = make_report("nct1", {{"energy", terms.energy}},
                                     {{"hardy", lam * terms.hardy},
                                      {"boundary", set.switching_sign() * lam_b * terms.boundary}},
                                     rel_tol);
    carry_scale(r, terms);
    return r;
}

InequalityReport report_nct1(const TestFunction& u, const TransformSet& set, double rel_tol) {
    return report_nct1(hardy_terms(u, set, false), set, rel_tol);
}

RemainderConstants remainder_constants(const TransformSet& set, double M) {
    const TransformParams& tp = set.params();
    const double p = tp.p, pc = tp.conjugate(), mu = tp.mu;
    RemainderConstants k;
    double m_factor = 1.0;
    if (p >= 2.0) {
        k.c = elementary_lower_bound_q(p, 2.0).c_estimate;
        k.M = M;
    } else {
        if (!(M >= 1.0)) throw PreconditionError("remainder constants for 1<p<2 require M\\ge1");
        const double margin = 1.0 - 2.0 / (mu * (p - 1.0) * M);
        if (!(margin > 0.0)) {
            throw PreconditionError("remainder constants for 1<p<2 require 1-2/(\\mu(p-1)M)>0, i.e. M > " +
                                    std::to_string(2.0 / (mu * (p - 1.0))));
        }
        k.c = elementary_lower_bound_M(p, M).c_estimate;
        k.M = M;
        m_factor = std::pow(M, p - 2.0);
    }
    k.d = k.c * 4.0 * pc / (p * p);
    k.d_used = k.d;
    const int s = set.switching_sign();
    if (s > 0) k.d_used = std::min(k.d, mu / m_factor);
    const double lam_b = std::pow(tp.lambda_p(), 1.0 / pc);
    k.L = lam_b * std::exp((1.0 - p) * set.log_f_eta()) * (1.0 - s * k.d_used * m_factor / (2.0 * mu));
    k.C = k.d_used * m_factor * lam_b / 4.0;
    return k;
}

InequalityReport report_nct2(const HardyTerms& terms, const TransformSet& set, const RemainderConstants& k,
                             double rel_tol) {
    const TransformParams& tp = set.params();
    // terms.boundary carries 1/f(eta)^{p-1}, which L also contains.
    const double l_times_f = k.L > 0.0 ? std::exp(std::log(k.L) + (tp.p - 1.0) * set.log_f_eta()) : 0.0;
    InequalityReport r = make_report("nct2", {{"energy", terms.energy}},
                                     {{"hardy", tp.lambda_p() * terms.hardy},
                                      {"remainder", k.C * terms.remainder},
                                      {"boundary", set.switching_sign() * l_times_f * terms.boundary}},
                                     rel_tol);
    carry_scale(r, terms);
    return r;
}

InequalityReport report_nct2(const TestFunction& u, const TransformSet& set, double M, double rel_tol) {
    const RemainderConstants k = remainder_constants(set, M);
    return report_nct2(hardy_terms(u, set, true), set, k, rel_tol);
}

InequalityReport report_c1(const TestFunction& u, const TransformSet& set, double C0, double C1, double L,
                           double rel_tol) {
    if (!set.weight_class().admissible) {
        throw PreconditionError("(c1) requires an admissible weight, w\\in W_A(R_+)");
    }
    if (!(C0 > 0.0) || !(C1 > 0.0) || !(L > 0.0)) throw PreconditionError("(c1) requires C_0, C_1, L > 0");
    const TransformParams& tp = set.params();
    const LogValue lam = constant(tp.lambda_p());
    const LogValue e = checked(u.integrate(energy_density(set)), "energy");
    const LogValue h = checked(u.integrate(potential_density(set, 0)), "Hardy");
    const LogValue rem = checked(u.integrate(potential_density(set, 2)), "remainder");
    const LogValue e_t = checked(u.integrate(energy_density(set, 1.0)), "t-weighted energy");
    const LogValue h_t = checked(u.integrate(potential_density(set, 0, 1.0)), "t-weighted Hardy");
    const LogValue r_t = checked(u.integrate(potential_density(set, 2, 1.0)), "t-weighted remainder");
    const LogValue b = abs_boundary_power(u, tp.p);
    InequalityReport r = make_log_report(
        "c1", {{"energy", e}, {"hardy", -(lam * h)}, {"remainder", -(constant(C0) * rem)}},
        {{"t_weighted", constant(C1) * (e_t + lam * h_t + constant(C0) * r_t)},
         {"boundary", constant(set.switching_sign() * L) * b}},
        rel_tol);
    add_flags(r, u);
    return r;
}

const char* to_string(Corollary c) {
    switch (c) {
        case Corollary::D: return "D";
        case Corollary::G: return "G";
        case Corollary::F: return "F";
        case Corollary::E: return "E";
        case Corollary::B: return "B";
    }
    return "?";
}

namespace {

// log int_t^eta e^{1/s} ds
double log_int_exp_inv(double t, double eta) {
    if (t >= eta) return kNegInf;
    const quadrature::LogIntegrand f = [](double s) { return LogValue::from_log(1.0 / s); };
    quadrature::Options o;
    o.singular_left = true;
    return quadrature::integrate(f, t, eta, o).log_abs;
}

// log int_0^t e^{-1/s} ds
double log_int_exp_neg_inv(double t) {
    const quadrature::LogIntegrand f = [](double s) {
        return s > 0.0 ? LogValue::from_log(-1.0 / s) : LogValue{};
    };
    quadrature::Options o;
    o.singular_right = true;
    return quadrature::integrate(f, 0.0, t, o).log_abs;
}

double max_relative_gap(const InequalityReport& a, const InequalityReport& b,
                        const std::vector<std::pair<std::string, std::string>>& pairs) {
    double worst = 0.0;
    for (const auto& [x, y] : pairs) {
        const double u = std::fabs(a.term(x)), v = std::fabs(b.term(y));
        if (u == 0.0 && v == 0.0) continue;
        if (u == 0.0 || v == 0.0) return 1.0;
        const double gap = std::fabs(std::log(u) + a.log_scale - std::log(v) - b.log_scale);
        worst = std::max(worst, -std::expm1(-gap));
    }
    return worst;
}

}  // namespace

CorollaryReport corollary_check(Corollary which, const TestFunction& u, const CorollaryParams& cp, double rel_tol) {
    const double p = cp.p, eta = cp.eta;
    if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("corollaries require 1<p<\\infty");
    if (!(eta > 0.0)) throw PreconditionError("corollaries require \\eta>0");
    if (std::fabs(u.eta() - eta) > 1e-12 * eta) throw PreconditionError("test function and corollary use different eta");
    const double pc = p / (p - 1.0);
    TransformParams tp;
    tp.p = p;
    tp.eta = eta;
    const double lam = tp.lambda_p();
    const double lam_b = std::pow(lam, 1.0 / pc);
    const double lam_a = tp.lambda_alpha(cp.alpha);
    const double lam_ab = std::pow(lam_a, 1.0 / pc);

    std::function<double(double)> log_wp;       // log W_p(e^y)
    std::function<double(double)> log_kernel;   // Hardy kernel without |u|^p
    double kappa = lam, beta = 0.0;
    bool boundary_on_lhs = true;
    WeightSpec weight;
    double mu = 1.0;
    switch (which) {
        case Corollary::D: {
            if (!(cp.mu > 0.0)) throw PreconditionError("(D) requires \\mu>0");
            mu = cp.mu;
            log_wp = [p](double y) { return -(p - 1.0) * std::exp(-y); };
            log_kernel = [p, eta, mu](double y) {
                const double t = std::exp(y);
                return 1.0 / t - p * log_add_exp(log_int_exp_inv(t, eta), std::log(mu));
            };
            beta = lam_b / std::pow(mu, p - 1.0);
            weight = WeightSpec::exp_inv_pow(-1, 1.0, p);
            break;
        }
        case Corollary::G: {
            log_wp = [p](double y) { return (p - 1.0) * std::exp(-y); };
            log_kernel = [p](double y) {
                const double t = std::exp(y);
                return -1.0 / t - p * log_int_exp_neg_inv(t);
            };
            beta = lam_b * std::exp(-(p - 1.0) * log_int_exp_neg_inv(eta));
            boundary_on_lhs = false;
            weight = WeightSpec::exp_inv_pow(1, 1.0, p);
            break;
        }
        case Corollary::F:
        case Corollary::B: {
            const double alpha = cp.alpha;
            if (which == Corollary::F && !(alpha > 1.0 / pc)) throw PreconditionError("(F) requires \\alpha>1/p'");
            if (which == Corollary::B && !(alpha < 1.0 / pc)) throw PreconditionError("(B) requires \\alpha<1/p'");
            log_wp = [alpha, p](double y) { return alpha * p * y; };
            log_kernel = [alpha, p](double y) { return (alpha - 1.0) * p * y; };
            kappa = lam_a;
            beta = lam_ab / std::pow(eta, p - 1.0 - alpha * p);
            boundary_on_lhs = which == Corollary::F;
            weight = WeightSpec::power(alpha, p);
            if (which == Corollary::F) mu = std::pow(lam / lam_a, 1.0 / p) * std::pow(eta, (p - 1.0 - alpha * p) / (p - 1.0));
            break;
        }
        case Corollary::E: {
            if (!(cp.R > std::exp(1.0))) throw PreconditionError("(E) requires R>e");
            const double R = cp.R;
            log_wp = [p](double y) { return (p - 1.0) * y; };
            log_kernel = [p, R, eta](double y) { return -y - p * std::log(std::log(R * eta) - y); };
            beta = lam_b / std::pow(std::log(R), p - 1.0);
            weight = WeightSpec::power(1.0 / pc, p);
            mu = std::log(R);
            break;
        }
    }

    const LogDensity e_density = [&](double y, const PointValue& v) {
        if (v.du.is_zero()) return LogValue{};
        return LogValue{p * v.du.log_abs + log_wp(y), 1};
    };
    const LogDensity h_density = [&](double y, const PointValue& v) {
        if (v.u.is_zero()) return LogValue{};
        return LogValue{p * v.u.log_abs + log_kernel(y), 1};
    };
    const LogValue e = checked(u.integrate(e_density), "energy");
    const LogValue h = checked(u.integrate(h_density), "Hardy");
    const LogValue b = constant(beta) * abs_boundary_power(u, p);

    CorollaryReport out;
    LogTermList lhs = {{"energy", e}}, rhs = {{"hardy", constant(kappa) * h}};
    (boundary_on_lhs ? lhs : rhs).push_back({"boundary", b});
    out.report = make_log_report(to_string(which), lhs, rhs, rel_tol);
    add_flags(out.report, u);

    tp.mu = mu;
    const TransformSet set = build_transforms(weight, tp);
    out.nct1 = report_nct1(u, set, rel_tol);
    out.cross_check_residual =
        max_relative_gap(out.report, out.nct1, {{"energy", "energy"}, {"hardy", "hardy"}, {"boundary", "boundary"}});
    return out;
}

InequalityReport monotone_comparison(const TestFunction& u, const TransformSet& set,
                                     const std::function<double(double)>& f, double rel_tol) {
    if (set.weight_class().kind != Kind::Q) {
        throw PreconditionError("monotone comparison requires a Q-class weight, w\\in Q(R_+)");
    }
    const double eta = set.params().eta;
    std::vector<double> probe = u.grid();
    const double lo = std::min(u.grid().front(), eta * 1e-6);
    for (int i = 0; i <= 400; ++i) probe.push_back(lo * std::pow(eta / lo, i / 400.0));
    std::sort(probe.begin(), probe.end());
    double previous = -kPosInf;
    for (const double t : probe) {
        const double v = f(std::min(t, eta));
        if (!std::isfinite(v)) throw PreconditionError("comparison profile must be finite on (0, eta]");
        if (v < previous - 1e-14 * std::max(1.0, std::fabs(previous))) {
            throw PreconditionError("comparison profile must be non-decreasing on the grid");
        }
        previous = v;
    }
    if (f(eta) > 1.0 + 1e-12) throw PreconditionError("comparison profile requires f(\\eta)\\le1");

    const LogValue lam = constant(set.params().lambda_p());
    const LogDensity e_density = energy_density(set);
    const LogDensity h_density = potential_density(set, 0);
    auto times_f = [&f](const LogDensity& d) -> LogDensity {
        return [&f, d](double y, const PointValue& v) { return d(y, v) * LogValue::from_double(f(std::exp(y))); };
    };
    const LogValue e = checked(u.integrate(e_density), "energy");
    const LogValue h = checked(u.integrate(h_density), "Hardy");
    const LogValue ef = checked(u.integrate(times_f(e_density)), "weighted energy");
    const LogValue hf = checked(u.integrate(times_f(h_density)), "weighted Hardy");
    InequalityReport r = make_log_report("monotone_comparison", {{"energy", e}, {"hardy", -(lam * h)}},
                                         {{"energy_f", ef}, {"hardy_f", -(lam * hf)}}, rel_tol);
    add_flags(r, u);
    return r;
}

}  // namespace hardy
