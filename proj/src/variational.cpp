#include "hardy/variational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "hardy/errors.hpp"
#include "hardy/extremals.hpp"

namespace hardy {

namespace {

constexpr double kClamp = 1e-30;
constexpr double kArmijo = 1e-4;

// 6-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 6> kGaussX = {
    0.5 - 0.4662347571015760, 0.5 - 0.3306046932331323, 0.5 - 0.1193095930415985,
    0.5 + 0.1193095930415985, 0.5 + 0.3306046932331323, 0.5 + 0.4662347571015760};
constexpr std::array<double, 6> kGaussW = {0.0856622461895852, 0.1803807865240693, 0.2339569672863455,
                                           0.2339569672863455, 0.1803807865240693, 0.0856622461895852};

void check_mesh(const Mesh& mesh) {
    if (mesh.nodes.size() < 3) throw DomainError("mesh needs at least 3 nodes");
    if (!(mesh.nodes.front() > 0.0)) throw DomainError("mesh must start at t_floor > 0");
    for (std::size_t i = 1; i < mesh.nodes.size(); ++i)
        if (!(mesh.nodes[i] > mesh.nodes[i - 1])) throw DomainError("mesh nodes must be strictly increasing");
}

// Quadrature rule for int_a^b phi(lambda) exp(log_density(t)) dt with t = a + lambda (b - a).
// Pieces are bisected until log_density varies by at most 1 across each.
DiscreteQuotient::Rule segment_rule(const std::function<double(double)>& log_density, double a, double b) {
    DiscreteQuotient::Rule rule;
    const double h = b - a;
    auto at = [&](double lam) { return log_density(lam >= 1.0 ? b : a + lam * h); };
    const double la = at(0.0), lb = at(1.0);
    const double peak = std::max(la, lb) + std::log(h);

    struct Piece { double l, r, fl, fr; int depth; };
    std::vector<Piece> stack{{0.0, 1.0, la, lb, 0}};
    while (!stack.empty()) {
        Piece pc = stack.back();
        stack.pop_back();
        const double m = 0.5 * (pc.l + pc.r);
        const double fm = at(m);
        const double hi = std::max({pc.fl, pc.fr, fm});
        const double lo = std::min({pc.fl, pc.fr, fm});
        const double width = pc.r - pc.l;
        if (hi + std::log(width * h) < peak - 60.0) continue;
        if (hi - lo > 1.0 && pc.depth < 48) {
            stack.push_back({pc.l, m, pc.fl, fm, pc.depth + 1});
            stack.push_back({m, pc.r, fm, pc.fr, pc.depth + 1});
            continue;
        }
        for (std::size_t q = 0; q < kGaussX.size(); ++q) {
            const double lam = pc.l + width * kGaussX[q];
            const double ld = at(lam);
            if (!std::isfinite(ld)) {
                if (ld == kNegInf) continue;
                throw EvaluationError("weight density is not finite on a mesh segment");
            }
            rule.lambda.push_back(lam);
            rule.log_weight.push_back(ld + std::log(kGaussW[q] * width * h));
        }
    }
    return rule;
}

double log_sum(const std::vector<double>& logs) {
    double acc = kNegInf;
    for (double l : logs) acc = log_add_exp(acc, l);
    return acc;
}

double finite_or_throw(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + " leaves the double range on this mesh");
    return x;
}

double signed_pow(double x, double e) { return std::copysign(std::pow(std::fabs(x), e), x); }

// Solves the symmetric tridiagonal system on indices [lo, hi]; false when a pivot is not positive.
bool solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off, std::size_t lo,
                       std::size_t hi, const std::vector<double>& rhs, std::vector<double>& x) {
    const std::size_t n = hi - lo + 1;
    std::vector<double> c(n), d(n);
    double pivot = diag[lo];
    if (!(pivot > 0.0)) return false;
    c[0] = off[lo] / pivot;
    d[0] = rhs[lo] / pivot;
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t i = lo + k;
        pivot = diag[i] - off[i - 1] * c[k - 1];
        if (!(pivot > 0.0) || !std::isfinite(pivot)) return false;
        c[k] = k + 1 < n ? off[i] / pivot : 0.0;
        d[k] = (rhs[i] - off[i - 1] * d[k - 1]) / pivot;
    }
    x.assign(diag.size(), 0.0);
    x[hi] = d[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) x[lo + k] = d[k] - c[k] * x[lo + k + 1];
    return true;
}

bool window_converged(const std::vector<double>& history, int window, double rel) {
    if (static_cast<int>(history.size()) <= window) return false;
    const double now = history.back();
    const double then = history[history.size() - 1 - window];
    return std::fabs(then - now) <= rel * std::fabs(now);
}

}  // namespace

Mesh log_mesh(double t_floor, double eta, std::size_t n) {
    if (!(t_floor > 0.0 && t_floor < eta) || n < 3) throw DomainError("log_mesh needs 0 < t_floor < eta, n >= 3");
    Mesh mesh;
    mesh.grading = Grading::log;
    const double la = std::log(t_floor), lb = std::log(eta);
    mesh.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) mesh.nodes[i] = std::exp(la + (lb - la) * double(i) / double(n - 1));
    mesh.nodes.front() = t_floor;
    mesh.nodes.back() = eta;
    mesh.ratio = std::exp((lb - la) / double(n - 1));
    return mesh;
}

double default_t_floor(const TransformSet& set, double target) {
    const double eta = set.params().eta;
    double t = target * eta;
    while (t < 0.1 * eta && std::fabs(set.log_w_y(std::log(t))) > 200.0) t *= 10.0;
    return t;
}

Mesh geometric_mesh(double t_floor, double eta, std::size_t n, double ratio) {
    if (!(t_floor > 0.0 && t_floor < eta) || n < 3 || !(ratio > 0.0))
        throw DomainError("geometric_mesh needs 0 < t_floor < eta, n >= 3, ratio > 0");
    Mesh mesh;
    mesh.grading = Grading::geometric;
    mesh.ratio = ratio;
    const std::size_t segments = n - 1;
    std::vector<double> widths(segments);
    double total = 0.0;
    for (std::size_t k = 0; k < segments; ++k) total += (widths[k] = std::pow(ratio, double(k)));
    mesh.nodes.resize(n);
    mesh.nodes[0] = t_floor;
    for (std::size_t k = 0; k < segments; ++k) mesh.nodes[k + 1] = mesh.nodes[k] + (eta - t_floor) * widths[k] / total;
    mesh.nodes.back() = eta;
    check_mesh(mesh);
    return mesh;
}

double rayleigh_quotient(const TestFunction& u, const TransformSet& set) {
    const HardyTerms terms = hardy_terms(u, set, false);
    if (terms.hardy == 0.0) throw DomainError("Rayleigh quotient undefined: Hardy integral vanishes");
    const auto& pr = set.params();
    const double credit = set.switching_sign() * std::pow(pr.lambda_p(), 1.0 / pr.conjugate()) * terms.boundary;
    return (terms.energy - credit) / terms.hardy;
}

DiscreteQuotient::DiscreteQuotient(const TransformSet& set, const Mesh& mesh, std::vector<double> log_scale)
    : set_(&set), mesh_(mesh), log_scale_(std::move(log_scale)) {
    check_mesh(mesh_);
    const std::size_t n = mesh_.nodes.size();
    if (log_scale_.size() != n) throw DomainError("log_scale must have one entry per mesh node");
    const auto& pr = set.params();
    p_ = pr.p;
    const double p = p_;
    auto log_wp = [&](double t) { return (p - 1.0) * set.log_w_y(std::log(t)); };
    auto log_k = [&](double t) {
        const double y = std::log(t);
        return (p - 1.0) * set.log_w_y(y) - p * set.log_F_y(y);
    };

    energy_coef_.resize(n - 1);
    rho_.resize(n - 1);
    rules_.resize(n - 1);
    hardy_weight_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = mesh_.nodes[i], b = mesh_.nodes[i + 1], h = b - a;
        const Rule energy_rule = segment_rule(log_wp, a, b);
        const double log_a = log_sum(energy_rule.log_weight);
        energy_coef_[i] = finite_or_throw(std::exp(p * log_scale_[i] + log_a - p * std::log(h)), "energy weight");
        rho_[i] = finite_or_throw(std::exp(log_scale_[i + 1] - log_scale_[i]), "node scale ratio");
        rules_[i] = segment_rule(log_k, a, b);
        auto& hw = hardy_weight_[i];
        hw.resize(rules_[i].lambda.size());
        for (std::size_t q = 0; q < hw.size(); ++q) {
            rules_[i].log_weight[q] += p * log_scale_[i];
            hw[q] = finite_or_throw(std::exp(rules_[i].log_weight[q]), "Hardy weight");
        }
    }
    const double lam = std::pow(pr.lambda_p(), 1.0 / pr.conjugate());
    boundary_coef_ = set.switching_sign() * lam *
                     finite_or_throw(std::exp(p * log_scale_.back() - (p - 1.0) * set.log_f_eta()), "boundary term");
}

double DiscreteQuotient::energy(const std::vector<double>& v) const {
    double e = 0.0;
    for (std::size_t i = 0; i < energy_coef_.size(); ++i)
        e += energy_coef_[i] * std::pow(std::fabs(rho_[i] * v[i + 1] - v[i]), p_);
    return e - boundary_coef_ * std::pow(std::fabs(v.back()), p_);
}

double DiscreteQuotient::hardy(const std::vector<double>& v) const {
    double h = 0.0;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& r = rules_[i];
        for (std::size_t q = 0; q < r.lambda.size(); ++q) {
            const double z = v[i] * (1.0 - r.lambda[q]) + rho_[i] * v[i + 1] * r.lambda[q];
            h += hardy_weight_[i][q] * std::pow(std::fabs(z), p_);
        }
    }
    return h;
}

void DiscreteQuotient::gradients(const std::vector<double>& v, std::vector<double>& de,
                                 std::vector<double>& dh) const {
    const std::size_t n = v.size();
    de.assign(n, 0.0);
    dh.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double k = p_ * energy_coef_[i] * signed_pow(rho_[i] * v[i + 1] - v[i], p_ - 1.0);
        de[i] -= k;
        de[i + 1] += rho_[i] * k;
        const auto& r = rules_[i];
        for (std::size_t q = 0; q < r.lambda.size(); ++q) {
            const double lam = r.lambda[q];
            const double z = v[i] * (1.0 - lam) + rho_[i] * v[i + 1] * lam;
            const double dz = p_ * hardy_weight_[i][q] * signed_pow(z, p_ - 1.0);
            dh[i] += dz * (1.0 - lam);
            dh[i + 1] += dz * rho_[i] * lam;
        }
    }
    de[n - 1] -= p_ * boundary_coef_ * signed_pow(v[n - 1], p_ - 1.0);
}

std::vector<double> DiscreteQuotient::gradient(const std::vector<double>& v) const {
    std::vector<double> de, dh;
    gradients(v, de, dh);
    const double h = hardy(v);
    const double q = energy(v) / h;
    for (std::size_t i = 0; i < de.size(); ++i) de[i] = (de[i] - q * dh[i]) / h;
    return de;
}

void DiscreteQuotient::hardy_hessian(const std::vector<double>& v, std::vector<double>& diag,
                                     std::vector<double>& off) const {
    const std::size_t n = v.size();
    diag.assign(n, 0.0);
    off.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& r = rules_[i];
        for (std::size_t q = 0; q < r.lambda.size(); ++q) {
            const double lam = r.lambda[q];
            const double z = v[i] * (1.0 - lam) + rho_[i] * v[i + 1] * lam;
            const double k = p_ * (p_ - 1.0) * hardy_weight_[i][q] *
                             (p_ == 2.0 ? 1.0 : std::pow(std::max(std::fabs(z), 1e-300), p_ - 2.0));
            diag[i] += k * (1.0 - lam) * (1.0 - lam);
            diag[i + 1] += k * rho_[i] * rho_[i] * lam * lam;
            off[i] += k * rho_[i] * lam * (1.0 - lam);
        }
    }
}

void DiscreteQuotient::energy_hessian(const std::vector<double>& v, std::vector<double>& diag,
                                      std::vector<double>& off) const {
    const std::size_t n = v.size();
    diag.assign(n, 0.0);
    off.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double delta = rho_[i] * v[i + 1] - v[i];
        const double floor = 1e-8 * (std::fabs(v[i]) + rho_[i] * std::fabs(v[i + 1])) + 1e-300;
        const double k = p_ * (p_ - 1.0) * energy_coef_[i] * (p_ == 2.0 ? 1.0 : std::pow(std::max(std::fabs(delta), floor), p_ - 2.0));
        diag[i] += k;
        diag[i + 1] += k * rho_[i] * rho_[i];
        off[i] -= k * rho_[i];
    }
}

namespace {

struct Setup {
    std::vector<double> log_scale;
    std::vector<double> v;
    std::size_t lo = 1, hi = 0;  // free index range
    bool normalize = true;
};

Setup initial_state(const TransformSet& set, const Mesh& mesh, const Boundary& boundary, double eps) {
    const auto& pr = set.params();
    const double a = 1.0 / pr.conjugate() + set.switching_sign() * eps;
    const PowerOfF guess(set, a);
    const std::size_t n = mesh.nodes.size();
    Setup s;
    s.log_scale.resize(n);
    for (std::size_t i = 1; i < n; ++i) s.log_scale[i] = guess.at(std::log(mesh.nodes[i])).u.log_abs;
    s.log_scale[0] = s.log_scale[1];
    s.v.assign(n, 1.0);
    s.v[0] = 0.0;
    s.hi = n - 1;
    if (boundary.kind == Boundary::pinned) {
        s.hi = n - 2;
        if (boundary.value == 0.0) {
            s.v[n - 1] = 0.0;
        } else {
            if (!(boundary.value > 0.0)) throw DomainError("pinned boundary value must be >= 0");
            const double end = boundary.value * std::exp(-s.log_scale[n - 1]);
            for (std::size_t i = 1; i < n; ++i) s.v[i] = end;
            s.normalize = false;
        }
    }
    return s;
}

void rescale_unit_hardy(const DiscreteQuotient& q, std::vector<double>& v, double p) {
    const double h = q.hardy(v);
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("Hardy integral of the iterate is not positive");
    const double c = std::pow(h, -1.0 / p);
    for (double& x : v) x *= c;
}

void inverse_iteration(const DiscreteQuotient& q, Setup& s, const MinimizeOptions& opt, MinimizationResult& r) {
    const std::size_t n = s.v.size();
    // Quadratic forms: S from the energy with boundary credit, M from the Hardy term.
    std::vector<double> ones(n, 1.0), sd, so, md, mo;
    q.energy_hessian(ones, sd, so);
    q.hardy_hessian(ones, md, mo);
    sd[n - 1] -= 2.0 * q.boundary_coef();
    for (auto* vec : {&sd, &so, &md, &mo})
        for (double& x : *vec) x *= 0.5;
    auto apply_m = [&](const std::vector<double>& x) {
        std::vector<double> y(n, 0.0);
        for (std::size_t i = s.lo; i <= s.hi; ++i) {
            y[i] = md[i] * x[i];
            if (i > s.lo) y[i] += mo[i - 1] * x[i - 1];
            if (i < s.hi) y[i] += mo[i] * x[i + 1];
        }
        return y;
    };

    std::vector<double> x = s.v;
    rescale_unit_hardy(q, x, 2.0);
    double value = q.value(x);
    r.history.push_back(value);
    for (int it = 1; it <= opt.max_iterations; ++it) {
        std::vector<double> z;
        if (!solve_tridiagonal(sd, so, s.lo, s.hi, apply_m(x), z))
            throw EvaluationError("energy form is not positive definite on this mesh");
        double sum = 0.0;
        for (double c : z) sum += c;
        if (sum < 0.0)
            for (double& c : z) c = -c;
        rescale_unit_hardy(q, z, 2.0);
        const double next = q.value(z);
        r.iterations = it;
        if (next > value * (1.0 + 1e-14)) {
            r.converged = window_converged(r.history, 1, opt.rel_change);
            break;
        }
        x = std::move(z);
        value = std::min(next, value);
        r.history.push_back(value);
        if (window_converged(r.history, opt.window, opt.rel_change)) {
            r.converged = true;
            break;
        }
    }
    s.v = std::move(x);
}

void preconditioned_descent(const DiscreteQuotient& q, Setup& s, const MinimizeOptions& opt, double p,
                            MinimizationResult& r) {
    const std::size_t n = s.v.size();
    std::vector<double> v = s.v;
    if (s.normalize) rescale_unit_hardy(q, v, p);
    double value = q.value(v);
    r.history.push_back(value);
    std::vector<double> de, dh, diag, off, d, trial;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        r.iterations = it;
        q.gradients(v, de, dh);
        const double h = q.hardy(v);
        std::vector<double> g(n, 0.0);
        for (std::size_t i = s.lo; i <= s.hi; ++i) g[i] = (de[i] - value * dh[i]) / h;
        q.energy_hessian(v, diag, off);
        for (std::size_t i = 0; i < n; ++i) {
            diag[i] /= h;
            off[i] /= h;
        }
        std::vector<double> neg(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -g[i];
        double slope = 0.0;
        const double end_curvature =
            p * (p - 1.0) * q.boundary_coef() * std::pow(std::max(std::fabs(v[n - 1]), kClamp), p - 2.0) / h;
        diag[n - 1] -= end_curvature;
        bool ok = solve_tridiagonal(diag, off, s.lo, s.hi, neg, d);
        if (!ok) {
            diag[n - 1] += end_curvature;
            ok = solve_tridiagonal(diag, off, s.lo, s.hi, neg, d);
        }
        if (ok) {
            for (std::size_t i = s.lo; i <= s.hi; ++i) slope += g[i] * d[i];
            ok = slope < 0.0 && std::isfinite(slope);
        }
        if (!ok) {
            d = neg;
            slope = 0.0;
            for (std::size_t i = s.lo; i <= s.hi; ++i) slope += g[i] * d[i];
        }
        if (slope == 0.0) {
            r.converged = true;
            break;
        }
        double alpha = 1.0;
        bool accepted = false;
        double next = value;
        for (int halving = 0; halving < 60; ++halving, alpha *= 0.5) {
            trial = v;
            for (std::size_t i = s.lo; i <= s.hi; ++i) trial[i] = std::max(v[i] + alpha * d[i], kClamp);
            next = q.value(trial);
            if (std::isfinite(next) && next <= value + kArmijo * alpha * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            r.converged = window_converged(r.history, 1, opt.rel_change) || r.history.size() == 1;
            break;
        }
        v = trial;
        if (s.normalize) rescale_unit_hardy(q, v, p);
        value = std::min(q.value(v), value);
        r.history.push_back(value);
        if (window_converged(r.history, opt.window, opt.rel_change)) {
            r.converged = true;
            break;
        }
    }
    s.v = std::move(v);
}

}  // namespace

MinimizationResult minimize_quotient(const TransformSet& set, const Mesh& mesh, Boundary boundary,
                                     const MinimizeOptions& options) {
    check_mesh(mesh);
    if (std::fabs(mesh.nodes.back() - set.params().eta) > 1e-12 * set.params().eta)
        throw DomainError("mesh must end at eta");
    Setup s = initial_state(set, mesh, boundary, options.init_eps);
    if (s.hi < s.lo) throw DomainError("mesh has no free nodes");
    const DiscreteQuotient q(set, mesh, s.log_scale);
    const double p = set.params().p;

    MinimizationResult r;
    if (p == 2.0 && s.normalize) {
        r.method = "inverse_iteration";
        inverse_iteration(q, s, options, r);
    } else {
        r.method = "preconditioned_descent";
        preconditioned_descent(q, s, options, p, r);
    }
    // Report the value without the positivity clamp.
    for (std::size_t i = s.lo; i <= s.hi; ++i)
        if (s.v[i] <= kClamp) s.v[i] = 0.0;
    r.value = q.value(s.v);
    if (!r.history.empty()) r.history.back() = std::min(r.history.back(), r.value);
    if (r.value > r.history.back()) r.history.back() = r.value;

    // The minimizer is scale free; shift its largest nodal value to 1 so it stays representable.
    double top = kNegInf;
    for (std::size_t i = 0; i < s.v.size(); ++i)
        if (s.v[i] > 0.0) top = std::max(top, s.log_scale[i] + std::log(s.v[i]));
    std::vector<double> values(s.v.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = s.v[i] > 0.0 ? std::exp(s.log_scale[i] + std::log(s.v[i]) - top) : 0.0;
    r.minimizer = TestFunction::piecewise_linear(mesh.nodes, values);
    r.minimizer.name = "minimizer";
    r.log_scale = std::move(s.log_scale);
    r.v = std::move(s.v);
    return r;
}

std::vector<InfimumRow> infimum_zero_demo(const WeightSpec& spec, const TransformParams& params,
                                          const std::vector<Mesh>& meshes) {
    const TransformSet set = build_transforms(spec, params);
    if (set.switching_sign() != -1) throw PreconditionError("the vanishing infimum needs a P-class weight");
    const double p = params.p;
    std::vector<InfimumRow> rows;
    for (const Mesh& mesh : meshes) {
        check_mesh(mesh);
        InfimumRow row;
        row.t_floor = mesh.nodes.front();
        auto log_wp = [&](double t) { return (p - 1.0) * set.log_w_y(std::log(t)); };
        // Minimal energy over increments summing to 1: (sum (h^p / A)^{1/(p-1)})^{1-p}.
        std::vector<double> terms;
        for (std::size_t i = 0; i + 1 < mesh.nodes.size(); ++i) {
            const double a = mesh.nodes[i], b = mesh.nodes[i + 1];
            const double log_a = log_sum(segment_rule(log_wp, a, b).log_weight);
            terms.push_back((p * std::log(b - a) - log_a) / (p - 1.0));
        }
        row.log_minimum = (1.0 - p) * log_sum(terms);
        row.minimum = std::exp(row.log_minimum);
        const double lf_floor = set.log_f(row.t_floor);
        row.log_continuum_minimum = (1.0 - p) * log_sub_exp(lf_floor, set.log_f_eta());
        if (row.t_floor < params.eta / 2.0)
            row.log_vanishing_energy = vanishing_family(set, row.t_floor).log_energy_closed_form;
        else
            row.log_vanishing_energy = kPosInf;
        rows.push_back(row);
    }
    return rows;
}

GradientCheck check_gradient(const DiscreteQuotient& q, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(0.5, 1.5), dir(-1.0, 1.0);
    GradientCheck out;
    const std::size_t n = q.size();
    for (int k = 0; k < points; ++k) {
        std::vector<double> v(n), r(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = value(rng);
            r[i] = dir(rng);
        }
        v[0] = 0.0;
        r[0] = 0.0;
        const std::vector<double> g = q.gradient(v);
        double analytic = 0.0;
        for (std::size_t i = 0; i < n; ++i) analytic += g[i] * r[i];
        const double step = 1e-5;
        std::vector<double> plus = v, minus = v;
        for (std::size_t i = 0; i < n; ++i) {
            plus[i] += step * r[i];
            minus[i] -= step * r[i];
        }
        const double fd = (q.value(plus) - q.value(minus)) / (2.0 * step);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::fabs(g[i] * r[i]);
        const double err = std::fabs(fd - analytic) / std::max(scale, 1e-300);
        out.worst_relative_error = std::max(out.worst_relative_error, err);
        ++out.points;
    }
    return out;
}

}  // namespace hardy
