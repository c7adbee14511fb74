#include "hardy/test_function.hpp"

#include <algorithm>
#include <cmath>

#include "hardy/errors.hpp"

namespace hardy {
namespace {

constexpr double kSingularGap = 5.0;

quadrature::QuadratureResult accumulate(const quadrature::QuadratureResult& a, const quadrature::QuadratureResult& b) {
    quadrature::QuadratureResult out;
    const LogValue sum = a.log_value() + b.log_value();
    out.log_abs = sum.log_abs;
    out.sign = sum.sign;
    out.value = sum.to_double();
    out.abs_error_estimate = a.abs_error_estimate + b.abs_error_estimate;
    out.rel_error_estimate = std::max(a.rel_error_estimate, b.rel_error_estimate);
    out.evaluations = a.evaluations + b.evaluations;
    out.converged = a.converged && b.converged;
    return out;
}

double finite_or(double x, double fallback) { return std::isfinite(x) ? x : fallback; }

}  // namespace

TestFunction TestFunction::piecewise_linear(std::vector<double> grid, std::vector<double> values) {
    if (grid.empty() || grid.size() != values.size()) {
        throw PreconditionError("test function needs matching, non-empty grid and values");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw PreconditionError("test function grid must lie in (0, eta]");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw PreconditionError("test function grid must be strictly increasing");
        if (!std::isfinite(values[i])) throw PreconditionError("test function values must be finite");
    }
    TestFunction u;
    u.grid_ = std::move(grid);
    u.values_ = std::move(values);
    if (u.values_.front() != 0.0) {
        u.tail_ = true;
        u.support_floor_ = 0.0;
    } else {
        std::size_t k = 0;
        while (k + 1 < u.values_.size() && u.values_[k + 1] == 0.0) ++k;
        u.support_floor_ = u.grid_[k];
    }
    return u;
}

TestFunction TestFunction::from_profile(std::shared_ptr<const Profile> profile, std::vector<double> sample_grid,
                                        double support_floor) {
    if (!profile) throw PreconditionError("profile test function needs a profile");
    if (sample_grid.empty()) throw PreconditionError("profile test function needs a sample grid");
    for (std::size_t i = 0; i < sample_grid.size(); ++i) {
        if (!(sample_grid[i] > 0.0)) throw PreconditionError("profile sample grid must lie in (0, eta]");
        if (i > 0 && !(sample_grid[i] > sample_grid[i - 1])) {
            throw PreconditionError("profile sample grid must be strictly increasing");
        }
    }
    if (support_floor < 0.0) throw PreconditionError("support floor must be >= 0");
    if (support_floor > 0.0 && std::fabs(sample_grid.front() - support_floor) > 1e-14 * support_floor) {
        throw PreconditionError("profile sample grid must start at the support floor");
    }
    TestFunction u;
    u.grid_ = std::move(sample_grid);
    u.profile_ = std::move(profile);
    u.support_floor_ = support_floor;
    u.tail_ = support_floor == 0.0;
    return u;
}

std::vector<double> TestFunction::values() const {
    if (!profile_) return values_;
    std::vector<double> out;
    out.reserve(grid_.size());
    for (const double t : grid_) out.push_back(at(t).u.to_double());
    return out;
}

PointValue TestFunction::pl_at(double t) const {
    const std::size_t n = grid_.size();
    if (t < grid_.front()) {
        if (!tail_) return {};
        const double slope = values_.front() / grid_.front();
        return {LogValue::from_double(slope * t), LogValue::from_double(slope)};
    }
    std::size_t i;
    if (n == 1) {
        const double slope = values_.front() / grid_.front();
        return {LogValue::from_double(values_.front()), LogValue::from_double(tail_ ? slope : 0.0)};
    }
    if (t >= grid_.back()) {
        i = n - 2;
    } else {
        i = static_cast<std::size_t>(std::upper_bound(grid_.begin(), grid_.end(), t) - grid_.begin()) - 1;
    }
    const double m = (values_[i + 1] - values_[i]) / (grid_[i + 1] - grid_[i]);
    double u = values_[i] + m * (t - grid_[i]);
    if (t == grid_[i]) u = values_[i];
    if (t == grid_.back()) u = values_.back();
    return {LogValue::from_double(u), LogValue::from_double(m)};
}

PointValue TestFunction::at_log(double y) const {
    if (std::isnan(y)) throw DomainError("test function evaluated at NaN");
    if (profile_) {
        if (y > std::log(eta()) + 1e-14) throw DomainError("test function evaluated beyond eta");
        if (support_floor_ > 0.0 && y < std::log(support_floor_)) return {};
        PointValue v = profile_->at(y);
        const LogValue c = LogValue::from_double(scale_);
        return {v.u * c, v.du * c};
    }
    return at(std::exp(y));
}

PointValue TestFunction::at(double t) const {
    if (!(t > 0.0)) throw DomainError("test function requires t > 0");
    if (t > eta() * (1.0 + 1e-14)) throw DomainError("test function evaluated beyond eta");
    if (profile_) return at_log(std::log(t));
    return pl_at(t);
}

double TestFunction::boundary_value() const { return boundary_log().to_double(); }

LogValue TestFunction::boundary_log() const {
    if (profile_) return at_log(std::log(eta())).u;
    return LogValue::from_double(values_.back());
}

TestFunction TestFunction::scaled(double c) const {
    if (!std::isfinite(c)) throw PreconditionError("scale factor must be finite");
    TestFunction out = *this;
    if (profile_) {
        out.scale_ *= c;
    } else {
        for (double& v : out.values_) v *= c;
        if (c == 0.0) {
            out.tail_ = false;
            out.support_floor_ = eta();
        }
    }
    return out;
}

TestFunction TestFunction::clipped(double c) const {
    if (profile_) throw PreconditionError("clipping is only defined for piecewise-linear test functions");
    if (!(c >= 0.0)) throw PreconditionError("clipping level must be >= 0");
    std::vector<double> grid, values;
    if (tail_ && values_.front() > c && c > 0.0) {
        grid.push_back(c * grid_.front() / values_.front());
        values.push_back(0.0);
    }
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (i > 0) {
            const double a = values_[i - 1] - c, b = values_[i] - c;
            if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
                const double root = grid_[i - 1] + (grid_[i] - grid_[i - 1]) * a / (a - b);
                if (root > grid_[i - 1] && root < grid_[i]) {
                    grid.push_back(root);
                    values.push_back(0.0);
                }
            }
        }
        grid.push_back(grid_[i]);
        values.push_back(std::max(values_[i] - c, 0.0));
    }
    TestFunction out = piecewise_linear(std::move(grid), std::move(values));
    out.name = name;
    return out;
}

std::vector<Segment> TestFunction::segments() const {
    std::vector<Segment> out;
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) out.push_back({grid_[i], grid_[i + 1], false});
    if (tail_) out.push_back({0.0, grid_.front(), true});
    return out;
}

quadrature::QuadratureResult TestFunction::integrate_segment(const LogDensity& density, const Segment& s) const {
    const quadrature::LogIntegrand in_y = [&](double y) {
        const LogValue d = density(y, at_log(y));
        if (d.is_zero()) return d;
        return LogValue{d.log_abs + y, d.sign};
    };
    if (s.tail) {
        const auto r = quadrature::integrate_to_minus_infinity(in_y, std::log(s.b));
        if (!r.converged) throw DivergenceError("integral over the improper tail near t = 0 does not converge");
        return r;
    }
    // zero_a / zero_b: u vanishes at that endpoint, where densities such as
    // |u|^{p-2} may be singular.
    auto piece = [&](double a, double b, bool zero_a, bool zero_b) {
        const double ya = std::log(a), yb = std::log(b);
        quadrature::Options options;
        options.singular_left = zero_a;
        options.singular_right = zero_b;
        if (!options.singular_left && !options.singular_right) {
            const LogValue da = in_y(ya), db = in_y(yb);
            const double la = finite_or(da.log_abs, kNegInf), lb = finite_or(db.log_abs, kNegInf);
            if (la > lb + kSingularGap) options.singular_left = true;
            if (lb > la + kSingularGap) options.singular_right = true;
        }
        return quadrature::integrate(in_y, ya, yb, options);
    };
    if (!profile_) {
        // Split at a sign change so each piece has a zero only at an endpoint.
        const auto ia = static_cast<std::size_t>(std::lower_bound(grid_.begin(), grid_.end(), s.a) - grid_.begin());
        const double ua = values_[ia], ub = values_[ia + 1];
        if (ua == 0.0 && ub == 0.0) return {};
        if ((ua < 0.0 && ub > 0.0) || (ua > 0.0 && ub < 0.0)) {
            const double root = s.a + (s.b - s.a) * ua / (ua - ub);
            if (root > s.a && root < s.b) {
                return accumulate(piece(s.a, root, ua == 0.0, true), piece(root, s.b, true, ub == 0.0));
            }
        }
        return piece(s.a, s.b, ua == 0.0, ub == 0.0);
    }
    return piece(s.a, s.b, at_log(std::log(s.a)).u.is_zero(), at_log(std::log(s.b)).u.is_zero());
}

quadrature::QuadratureResult TestFunction::integrate(const LogDensity& density, const std::vector<bool>* mask) const {
    quadrature::QuadratureResult total;
    const auto segs = segments();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        if (mask && (k >= mask->size() || !(*mask)[k])) continue;
        const Segment& s = segs[k];
        if (!s.tail && s.b <= support_floor_) continue;
        total = accumulate(total, integrate_segment(density, s));
    }
    return total;
}

}  // namespace hardy
