#include "hardy/identities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "hardy/errors.hpp"

namespace hardy {
namespace {

// Generalized binomial series of |1+X|^p - 1 - pX for small |X|.
double numerator_series(double p, double X) {
    double coef = p * (p - 1.0) / 2.0;
    double power = X * X;
    double sum = coef * power;
    for (int k = 3; k < 40; ++k) {
        coef *= (p - k + 1.0) / k;
        power *= X;
        const double term = coef * power;
        sum += term;
        if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

using Ratio = std::function<double(double)>;

ElementaryConstant minimize_ratio(const Ratio& ratio, double limit_zero, double limit_inf) {
    std::vector<double> xs;
    const int per_side = 4000;
    for (int i = 0; i <= per_side; ++i) {
        const double x = std::pow(10.0, -6.0 + 10.0 * i / per_side);
        xs.push_back(x);
        xs.push_back(-x);
    }
    for (int i = -20000; i <= 20000; ++i) {
        if (i != 0) xs.push_back(i * 1e-4);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> rs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) rs[i] = ratio(xs[i]);
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                      [&](std::size_t a, std::size_t b) { return rs[a] < rs[b]; });

    double best = rs[order[0]], arg = xs[order[0]];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 0; k < 3; ++k) {
        const std::size_t i = order[k];
        double a = xs[i > 0 ? i - 1 : i], b = xs[i + 1 < xs.size() ? i + 1 : i];
        if (a < 0.0 && b > 0.0) continue;  // never straddle X = 0
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = ratio(c), fd = ratio(d);
        for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = ratio(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = ratio(d);
            }
        }
        const double x = fc < fd ? c : d, r = std::min(fc, fd);
        if (r < best) {
            best = r;
            arg = x;
        }
    }
    if (limit_zero < best) {
        best = limit_zero;
        arg = 0.0;
    }
    if (limit_inf < best) {
        best = limit_inf;
        arg = kPosInf;
    }
    ElementaryConstant out;
    out.c_estimate = best;
    out.argmin_X = arg;
    return out;
}

std::mutex cache_mutex;
std::map<std::pair<double, double>, ElementaryConstant> q_cache, m_cache;

double log_abs_or(const LogValue& v) { return v.is_zero() ? kNegInf : v.log_abs; }

// Signed relative residual of two log-form values.
IdentityResidual compare(const LogValue& l, const LogValue& r) {
    IdentityResidual out;
    out.lhs = l.to_double();
    out.rhs = r.to_double();
    if (l.is_zero() && r.is_zero()) return out;
    if (l.is_zero() || r.is_zero()) {
        out.residual = l.is_zero() ? -r.sign : l.sign;
        return out;
    }
    if (l.sign != r.sign) {
        out.residual = 2.0 * l.sign;
        return out;
    }
    const double d = l.log_abs - r.log_abs;
    out.residual = d >= 0.0 ? -l.sign * std::expm1(-d) : l.sign * std::expm1(d);
    return out;
}

struct LogFrameTerms {
    double lv, lg, ldg, lW, lF, lu;
    LogValue X, dv;
};

LogFrameTerms log_terms(const SubstitutionFrame& frame, const FrameNode& n) {
    const double p = frame.set->params().p;
    LogFrameTerms t;
    t.lv = log_abs_or(n.v);
    t.lg = n.log_g;
    t.ldg = n.dg.log_abs;
    t.lW = (p - 1.0) * n.log_w;
    t.lF = n.log_F;
    t.lu = log_abs_or(n.u);
    t.X = LogValue::from_double(n.X);
    t.dv = n.dv;
    return t;
}

// |u|' / |u| * F, the only place where u' enters the substitution.
struct LocalState {
    LogValue abs_u, abs_du;
    double X = 0.0;
    bool zero = true;
};

LocalState local_state(const PointValue& pv, double log_F, int s, double pc) {
    LocalState st;
    st.abs_u = pv.u.is_zero() ? LogValue{} : LogValue{pv.u.log_abs, 1};
    if (pv.u.is_zero()) {
        st.abs_du = pv.du.is_zero() ? LogValue{} : LogValue{pv.du.log_abs, 1};
        return st;
    }
    st.zero = false;
    st.abs_du = pv.du.is_zero() ? LogValue{} : LogValue{pv.du.log_abs, pv.du.sign * pv.u.sign};
    if (st.abs_du.is_zero()) {
        st.X = -1.0;
    } else {
        const double r = st.abs_du.sign * std::exp(st.abs_du.log_abs + log_F - st.abs_u.log_abs);
        st.X = s * pc * r - 1.0;
        // below this X carries no significant digits
        if (std::fabs(st.X) < 64.0 * 2.220446049250313e-16 * std::max(1.0, std::fabs(pc * r))) st.X = 0.0;
    }
    return st;
}

LogValue checked(const quadrature::QuadratureResult& r, const char* what) {
    if (std::isnan(r.log_abs) || r.log_abs == kPosInf) throw DivergenceError(std::string(what) + " integral is not finite");
    return r.log_value();
}

LogValue constant(double c) { return LogValue::from_double(c); }

// |u|^p W_p / (F^p G^{g_power}) t^{extra}
LogDensity remainder_density(const TransformSet& set, double extra_log_t, int g_power = 2) {
    const double p = set.params().p;
    return [&set, p, extra_log_t, g_power](double y, const PointValue& v) {
        if (v.u.is_zero()) return LogValue{};
        double l = p * v.u.log_abs - set.log_w_y(y) - p * set.log_f_y(y) + extra_log_t * y;
        if (g_power != 0) l -= g_power * std::log(set.G_y(y));
        return LogValue{l, 1};
    };
}

std::vector<bool> segment_mask(const TestFunction& u, const std::vector<bool>& node_mask) {
    const auto segs = u.segments();
    std::vector<bool> mask(segs.size(), false);
    const std::size_t n = u.grid().size();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const std::size_t node = segs[k].tail ? 0 : k;
        mask[k] = node < node_mask.size() && node < n && node_mask[node];
    }
    return mask;
}

// v^p / G at t, or its value near 0+ for the tail.
LogValue phi_squared(const TestFunction& u, const TransformSet& set, double t) {
    const PointValue pv = u.at(t);
    if (pv.u.is_zero()) return {};
    const double p = set.params().p;
    const double lg = (std::log(set.params().conjugate()) + set.log_f(t)) / set.params().conjugate();
    return {p * (pv.u.log_abs - lg) - std::log(set.G(t)), 1};
}

}  // namespace

double elementary_numerator(double p, double X) {
    if (p == 2.0) return X * X;
    if (std::fabs(X) < 1e-3) return numerator_series(p, X);
    return std::pow(std::fabs(1.0 + X), p) - 1.0 - p * X;
}

ElementaryConstant elementary_lower_bound_q(double p, double q) {
    if (!(p >= 2.0) || !std::isfinite(p)) throw PreconditionError("the q branch requires p\\ge2");
    if (!(q >= 2.0 && q <= p)) throw PreconditionError("the q branch requires 2\\le q\\le p");
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        const auto it = q_cache.find({p, q});
        if (it != q_cache.end()) return it->second;
    }
    const double lim0 = q == 2.0 ? p * (p - 1.0) / 2.0 : kPosInf;
    const double lim_inf = q == p ? 1.0 : kPosInf;
    ElementaryConstant out = minimize_ratio(
        [p, q](double X) { return elementary_numerator(p, X) / (q == 2.0 ? X * X : std::pow(std::fabs(X), q)); }, lim0, lim_inf);
    out.p = p;
    out.q = q;
    std::lock_guard<std::mutex> lock(cache_mutex);
    q_cache[{p, q}] = out;
    return out;
}

ElementaryConstant elementary_lower_bound_M(double p, double M) {
    if (!(p > 1.0 && p < 2.0)) throw PreconditionError("the M branch requires 1<p<2");
    if (!(M >= 1.0) || !std::isfinite(M)) throw PreconditionError("the M branch requires M\\ge1");
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        const auto it = m_cache.find({p, M});
        if (it != m_cache.end()) return it->second;
    }
    const double mfac = std::pow(M, p - 2.0);
    ElementaryConstant out = minimize_ratio(
        [p, M, mfac](double X) {
            const double ax = std::fabs(X);
            const double den = ax <= M ? mfac * X * X : std::pow(ax, p);
            return elementary_numerator(p, X) / den;
        },
        p * (p - 1.0) / 2.0 / mfac, 1.0);
    out.p = p;
    out.M = M;
    std::lock_guard<std::mutex> lock(cache_mutex);
    m_cache[{p, M}] = out;
    return out;
}

SubstitutionFrame substitution_frame(const TestFunction& u, const TransformSet& set, double M) {
    if (!(M > 1.0)) throw PreconditionError("the substitution frame requires M>1");
    SubstitutionFrame frame;
    frame.u = &u;
    frame.set = &set;
    frame.M = M;
    const double p = set.params().p, pc = set.params().conjugate();
    const int s = set.switching_sign();
    for (const double t : u.grid()) {
        FrameNode n;
        n.t = t;
        const PointValue pv = u.at(t);
        n.log_w = set.log_F(t) - set.log_f(t);
        n.log_f = set.log_f(t);
        n.log_F = set.log_F(t);
        n.G = set.G(t);
        n.log_g = (std::log(pc) + n.log_f) / pc;
        n.dg = LogValue{-std::log(pc) / p - n.log_f / p - n.log_w, s};
        const LocalState st = local_state(pv, n.log_F, s, pc);
        n.u = st.abs_u;
        n.du = st.abs_du;
        if (st.zero) {
            n.v = LogValue{};
            n.dv = st.abs_du.is_zero() ? LogValue{} : LogValue{st.abs_du.log_abs - n.log_g, 1};
            n.X = 0.0;
            n.in_A = true;
        } else {
            n.v = LogValue{n.u.log_abs - n.log_g, 1};
            n.X = st.X;
            // v' = X v / (s p' F)
            n.dv = n.X == 0.0 ? LogValue{}
                              : LogValue{std::log(std::fabs(n.X)) + n.v.log_abs - std::log(pc) - n.log_F,
                                         s * (n.X > 0.0 ? 1 : -1)};
            n.in_A = std::fabs(n.X) <= M;
        }
        frame.nodes.push_back(n);
    }
    return frame;
}

const char* to_string(Identity id) {
    switch (id) {
        case Identity::I413: return "I413";
        case Identity::I414: return "I414";
        case Identity::I415: return "I415";
        case Identity::I416: return "I416";
        case Identity::I417: return "I417";
    }
    return "?";
}

IdentityResidual verify_pointwise_identity(const SubstitutionFrame& frame, Identity id, std::size_t node) {
    if (node >= frame.nodes.size()) throw DomainError("identity check outside the frame");
    const FrameNode& n = frame.nodes[node];
    const double p = frame.set->params().p, pc = frame.set->params().conjugate();
    const int s = frame.set->switching_sign();
    const LogFrameTerms t = log_terms(frame, n);
    const double lX = t.X.is_zero() ? kNegInf : t.X.log_abs;
    const double ldv = t.dv.is_zero() ? kNegInf : t.dv.log_abs;
    const bool v_zero = n.v.is_zero();
    auto lv = [](double l, int sign = 1) { return std::isfinite(l) ? LogValue{l, sign} : LogValue{}; };
    switch (id) {
        case Identity::I413:
            return compare(lv((p - 1.0) * t.ldg + t.lg + t.lW), LogValue{0.0, 1});
        case Identity::I414: {
            // (|v|^p)' = p |v|^{p-1} v'
            const LogValue lhs = lv(std::log(p) + p * t.lv + p * t.ldg + lX + t.lW, t.X.sign);
            const LogValue rhs = v_zero ? LogValue{} : lv(std::log(p) + (p - 1.0) * t.lv + ldv, s * t.dv.sign);
            return compare(lhs, rhs);
        }
        case Identity::I415:
            return compare(lv(p * t.lv + p * t.ldg + t.lW),
                           lv(std::log(frame.set->params().lambda_p()) + p * t.lu + t.lW - p * t.lF));
        case Identity::I416:
        case Identity::I417: {
            if (v_zero) {
                IdentityResidual r;
                r.defined = false;
                r.notice = "v = 0 at this node";
                return r;
            }
            if (id == Identity::I416) {
                const double lz = std::log(p / 2.0) + (p / 2.0 - 1.0) * t.lv + ldv;
                return compare(lv(p * t.lv + p * t.ldg + 2.0 * lX + t.lW),
                               lv(std::log(4.0 * pc / (p * p)) + 2.0 * lz + t.lF));
            }
            return compare(lv(p * t.lv + p * t.ldg + p * lX + t.lW),
                           lv((p - 1.0) * std::log(pc) + p * ldv + (p - 1.0) * t.lF));
        }
    }
    return {};
}

IdentityResidual verify_pointwise_identity(const SubstitutionFrame& frame, Identity id, double t) {
    for (std::size_t i = 0; i < frame.nodes.size(); ++i) {
        if (frame.nodes[i].t == t) return verify_pointwise_identity(frame, id, i);
    }
    throw DomainError("identity checks are evaluated at frame nodes only");
}

std::vector<IdentitySweep> sweep_identities(const SubstitutionFrame& frame) {
    std::vector<IdentitySweep> out;
    for (const Identity id : {Identity::I413, Identity::I414, Identity::I415, Identity::I416, Identity::I417}) {
        IdentitySweep sw;
        sw.id = id;
        for (std::size_t i = 0; i < frame.nodes.size(); ++i) {
            const IdentityResidual r = verify_pointwise_identity(frame, id, i);
            if (!r.defined) {
                ++sw.skipped;
                continue;
            }
            ++sw.checked;
            if (std::fabs(r.residual) >= std::fabs(sw.worst_residual)) {
                sw.worst_residual = r.residual;
                sw.worst_t = frame.nodes[i].t;
            }
        }
        out.push_back(sw);
    }
    return out;
}

BoundaryIntegralCheck boundary_integral_check(const SubstitutionFrame& frame) {
    const TestFunction& u = *frame.u;
    const TransformSet& set = *frame.set;
    const double p = set.params().p, pc = set.params().conjugate();
    const int s = set.switching_sign();
    double vmax = 0.0;
    for (const auto& n : frame.nodes) {
        if (!n.v.is_zero()) vmax = std::max(vmax, p * n.v.log_abs);
    }
    if (u.improper_tail()) {
        const double t0 = u.grid().front() * 1e-10;
        const PointValue pv = u.at(t0);
        if (!pv.u.is_zero()) {
            const double lv = p * (pv.u.log_abs - (std::log(pc) + set.log_f(t0)) / pc);
            if (lv > vmax + std::log(1e-8)) {
                throw PreconditionError("v = u/g does not vanish at 0+, the boundary integral needs v(0+)=0");
            }
        }
    }
    // (|v|^p)' = p |v|^{p-1} v' with v' = X v / (s p' F)
    const LogDensity d = [&set, p, pc, s](double y, const PointValue& pv) {
        if (pv.u.is_zero()) return LogValue{};
        const double lF = set.log_F_y(y), lf = set.log_f_y(y);
        const LocalState st = local_state(pv, lF, s, pc);
        if (st.X == 0.0) return LogValue{};
        const double lv = st.abs_u.log_abs - (std::log(pc) + lf) / pc;
        return LogValue{std::log(p) + p * lv + std::log(std::fabs(st.X)) - std::log(pc) - lF,
                        s * (st.X > 0.0 ? 1 : -1)};
    };
    const LogDensity abs_d = [&d](double y, const PointValue& pv) {
        LogValue v = d(y, pv);
        if (!v.is_zero()) v.sign = 1;
        return v;
    };
    BoundaryIntegralCheck out;
    const LogValue lhs = checked(u.integrate(d), "boundary");
    const LogValue scale = checked(u.integrate(abs_d), "boundary variation");
    const LogValue bl = u.boundary_log();
    const LogValue rhs = bl.is_zero() ? LogValue{}
                                      : LogValue{std::log(set.params().lambda_p()) / pc + p * bl.log_abs -
                                                     (p - 1.0) * set.log_f_eta(),
                                                 1};
    out.lhs = lhs.to_double();
    out.rhs = rhs.to_double();
    const double floor = std::max({lhs.log_abs, rhs.log_abs, scale.log_abs});
    const LogValue diff = lhs - rhs;
    out.residual = diff.is_zero() ? 0.0 : std::exp(diff.log_abs - floor);
    return out;
}

namespace {

LogDensity gradient_density(const TransformSet& set) {
    const double p = set.params().p, pc = set.params().conjugate();
    const int s = set.switching_sign();
    // (p^2/4) |v|^p (r - s/p')^2 / F, r = F |u|'/|u|; note r - s/p' = s (X)/p'
    return [&set, p, pc, s](double y, const PointValue& pv) {
        if (pv.u.is_zero()) return LogValue{};
        const double lF = set.log_F_y(y), lf = set.log_f_y(y);
        const LocalState st = local_state(pv, lF, s, pc);
        if (st.X == 0.0) return LogValue{};
        const double lv = st.abs_u.log_abs - (std::log(pc) + lf) / pc;
        return LogValue{2.0 * std::log(p / 2.0) + p * lv + 2.0 * std::log(std::fabs(st.X) / pc) - lF, 1};
    };
}

}  // namespace

InequalityReport ground_state_check(const SubstitutionFrame& frame, const std::vector<bool>& node_mask,
                                    double rel_tol) {
    const TestFunction& u = *frame.u;
    const TransformSet& set = *frame.set;
    const double pc = set.params().conjugate();
    const std::vector<bool> mask = segment_mask(u, node_mask);
    const LogValue lhs = checked(u.integrate(gradient_density(set), &mask), "gradient");
    const LogValue rem = checked(u.integrate(remainder_density(set, 0.0), &mask), "remainder");
    LogValue phi_total;
    const auto segs = u.segments();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        if (!mask[k]) continue;
        const double a = segs[k].tail ? segs[k].b * 1e-10 : segs[k].a;
        phi_total = phi_total + phi_squared(u, set, segs[k].b) - phi_squared(u, set, a);
    }
    return make_log_report("ground_state", {{"gradient", lhs}},
                           {{"phi_squared", constant(-0.5) * phi_total},
                            {"remainder", rem / constant(4.0 * std::pow(pc, set.params().p - 1.0))}},
                           rel_tol);
}

InequalityReport ground_state_full(const SubstitutionFrame& frame, double rel_tol) {
    const TestFunction& u = *frame.u;
    const TransformSet& set = *frame.set;
    const TransformParams& tp = set.params();
    const double p = tp.p, pc = tp.conjugate();
    const LogValue lhs = checked(u.integrate(gradient_density(set)), "gradient");
    const LogValue rem = checked(u.integrate(remainder_density(set, 0.0)), "remainder");
    const LogValue b = u.boundary_log();
    const LogValue boundary =
        b.is_zero() ? LogValue{}
                    : LogValue{std::log(tp.lambda_p()) / pc + p * b.log_abs - (p - 1.0) * set.log_f_eta() -
                                   std::log(2.0 * tp.mu),
                               -1};
    return make_log_report("ground_state_full", {{"gradient", lhs}},
                           {{"boundary", boundary}, {"remainder", rem / constant(4.0 * std::pow(pc, p - 1.0))}},
                           rel_tol);
}

InequalityReport weighted_t_bound_check(const TestFunction& u, const TransformSet& set, double K, double rel_tol) {
    if (!set.weight_class().admissible) {
        throw PreconditionError("the t-weighted bound requires an admissible weight, w\\in W_A(R_+)");
    }
    if (!(K > 0.0)) throw PreconditionError("the t-weighted bound requires K>0");
    const double p = set.params().p;
    const LogDensity h_t = [&set, p](double y, const PointValue& v) {
        if (v.u.is_zero()) return LogValue{};
        return LogValue{p * v.u.log_abs - set.log_w_y(y) - p * set.log_f_y(y) + y, 1};
    };
    const LogValue lhs = checked(u.integrate(h_t), "t-weighted Hardy");
    const LogValue rem = checked(u.integrate(remainder_density(set, 0.0)), "remainder");
    InequalityReport r =
        make_log_report("t_weight_bound", {{"remainder", constant(K * K) * rem}}, {{"t_weighted", lhs}}, rel_tol);
    for (const double t : u.grid()) {
        const double G = set.G(t);
        if (t * G * G > K * K * (1.0 + 1e-12)) {
            r.flags.push_back("pointwise bound t<=K^2/G^2 fails at t=" + std::to_string(t));
            r.pass = false;
            break;
        }
    }
    return r;
}

InequalityReport assembled_remainder_check(const SubstitutionFrame& frame, double rel_tol) {
    const TestFunction& u = *frame.u;
    const TransformSet& set = *frame.set;
    const TransformParams& tp = set.params();
    const double p = tp.p, pc = tp.conjugate(), M = frame.M;
    const int s = set.switching_sign();
    const double lam = tp.lambda_p();
    double c;
    std::function<double(double)> log_den;
    if (p >= 2.0) {
        c = elementary_lower_bound_q(p, 2.0).c_estimate;
        log_den = [](double X) { return 2.0 * std::log(std::fabs(X)); };
    } else {
        c = elementary_lower_bound_M(p, M).c_estimate;
        const double lm = (p - 2.0) * std::log(M);
        log_den = [lm, M, p](double X) {
            const double ax = std::fabs(X);
            return ax <= M ? lm + 2.0 * std::log(ax) : p * std::log(ax);
        };
    }
    // c Lambda_p |u|^p W_p / F^p * den(X)
    const LogDensity extra = [&set, &log_den, p, pc, s, c, lam](double y, const PointValue& pv) {
        if (pv.u.is_zero()) return LogValue{};
        const double lF = set.log_F_y(y);
        const LocalState st = local_state(pv, lF, s, pc);
        if (st.X == 0.0) return LogValue{};
        return LogValue{std::log(c * lam) + p * st.abs_u.log_abs + (p - 1.0) * set.log_w_y(y) - p * lF +
                            log_den(st.X),
                        1};
    };
    const LogValue term = checked(u.integrate(extra), "remainder density");
    const LogValue e = checked(u.integrate([&set, p](double y, const PointValue& pv) {
        if (pv.du.is_zero()) return LogValue{};
        return LogValue{p * pv.du.log_abs + (p - 1.0) * set.log_w_y(y), 1};
    }), "energy");
    const LogValue h = checked(u.integrate(remainder_density(set, 0.0, 0)), "Hardy");
    const LogValue bl = u.boundary_log();
    const LogValue b = bl.is_zero() ? LogValue{}
                                    : LogValue{std::log(lam) / pc + p * bl.log_abs - (p - 1.0) * set.log_f_eta(), s};
    InequalityReport r = make_log_report("assembled_remainder", {{"energy", e}},
                                         {{"hardy", constant(lam) * h}, {"boundary", b},
                                          {p >= 2.0 ? "gradient" : "split", term}},
                                         rel_tol);
    if (u.improper_tail()) r.flags.push_back("improper-tail");
    return r;
}

PointwiseBoundResult pointwise_derivative_bound(const SubstitutionFrame& frame) {
    const TransformParams& tp = frame.set->params();
    const double p = tp.p, pc = tp.conjugate(), M = frame.M;
    const double llam = std::log(tp.lambda_p());
    PointwiseBoundResult out;
    for (const FrameNode& n : frame.nodes) {
        if (n.v.is_zero() || n.du.is_zero()) {
            ++out.skipped;
            continue;
        }
        const double lW = (p - 1.0) * n.log_w;
        const double lhs = p * n.du.log_abs + lW;
        double bound;
        if (n.in_A) {
            bound = llam + p * std::log1p(M) + p * n.u.log_abs + lW - p * n.log_F;
        } else {
            bound = p * std::log(2.0) - llam / pc + p * n.dv.log_abs + (p - 1.0) * n.log_F;
        }
        out.worst_ratio = std::max(out.worst_ratio, std::exp(lhs - bound));
        ++out.checked;
    }
    return out;
}

}  // namespace hardy
