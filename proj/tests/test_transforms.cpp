#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hardy/errors.hpp"
#include "hardy/quadrature.hpp"
#include "hardy/transforms.hpp"

using namespace hardy;

namespace {
TransformParams params(double p, double eta, double mu) {
    TransformParams tp;
    tp.p = p;
    tp.eta = eta;
    tp.mu = mu;
    return tp;
}
}  // namespace

TEST_CASE("power weight closed form") {
    const auto set = build_transforms(WeightSpec::power(1.0, 2.0), params(2.0, 1.0, 1.0));
    CHECK(set.mode() == Mode::closed_form);
    CHECK(set.eval(Which::F, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(set.eval(Which::G, 0.3) == doctest::Approx(1.0 + std::log(1.0 / 0.3)).epsilon(1e-14));
    CHECK(set.eval(Which::f, 0.25) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(set.eval(Which::G, 2.0) == 1.0);
    CHECK(set.eval(Which::f, 3.0) == doctest::Approx(1.0));
}

TEST_CASE("critical power weight") {
    const double p = 3.0, pc = 1.5;
    const double mu = 0.7, eta = 0.5;
    const auto set = build_transforms(WeightSpec::power(1.0 / pc, p), params(p, eta, mu));
    for (const double t : {1e-6, 1e-3, 0.1, 0.4}) {
        CHECK(set.eval(Which::F, t) == doctest::Approx(t * (mu + std::log(eta / t))).epsilon(1e-13));
    }
}

TEST_CASE("constant weight") {
    const auto set = build_transforms(WeightSpec::constant(3.0), params(3.0, 1.0, 1.0));
    CHECK(set.weight_class().kind == Kind::Q);
    for (const double t : {1e-4, 0.2, 0.9}) {
        CHECK(set.eval(Which::f, t) == doctest::Approx(t).epsilon(1e-14));
        CHECK(set.eval(Which::F, t) == doctest::Approx(t).epsilon(1e-14));
        CHECK(set.eval(Which::g, t) == doctest::Approx(std::pow(1.5 * t, 2.0 / 3.0)).epsilon(1e-13));
    }
}

TEST_CASE("coupling constant gives F = t/(alpha p' - 1)") {
    const double p = 2.5, alpha = 1.2, eta = 0.8;
    const double e = alpha * p / (p - 1.0);
    const auto set = build_transforms(WeightSpec::power(alpha, p), params(p, eta, power_coupling_mu(alpha, p, eta)));
    for (const double t : {1e-8, 1e-2, 0.5}) {
        CHECK(set.eval(Which::F, t) == doctest::Approx(t / (e - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("quadrature and closed form agree for power weights") {
    for (const double alpha : {0.3, 0.5, 0.9, 1.6}) {
        const auto spec = WeightSpec::power(alpha, 2.0);
        const auto tp = params(2.0, 1.0, 1.0);
        const auto closed = build_transforms(spec, tp);
        const auto quad = build_transforms(spec, tp, ModePreference::quadrature);
        CHECK(quad.mode() == Mode::quadrature);
        for (int k = 0; k <= 30; ++k) {
            const double t = std::pow(10.0, -3.0 + 0.1 * k);
            CHECK(relative_difference(closed.eval(Which::f, t), quad.eval(Which::f, t)) < 1e-8);
            CHECK(relative_difference(closed.eval(Which::G, t), quad.eval(Which::G, t)) < 1e-8);
        }
    }
}

TEST_CASE("F/t^2 near zero for exponential weights") {
    const auto p_set = build_transforms(WeightSpec::exp_inv_pow(-1, 1.0, 2.0), params(2.0, 1.0, 1.0));
    CHECK(relative_difference(p_set.eval(Which::F, 1e-3) / 1e-6, 1.002006024120725080686549202117128050563) < 1e-9);
    const auto q_set = build_transforms(WeightSpec::exp_inv_pow(1, 1.0, 2.0), params(2.0, 1.0, 1.0));
    CHECK(relative_difference(q_set.eval(Which::F, 1e-3) / 1e-6, 0.9980059761192850000392906439395296097824) < 1e-9);
}

TEST_CASE("structural invariants on built-in weights") {
    for (const double p : {1.5, 2.0, 4.0}) {
        for (const auto& w : builtin_weights(p)) {
            INFO(w.name);
            const auto set = build_transforms(w, params(p, 1.0, 1.0));
            const double mu = 1.0;
            double prev_f = set.log_f(1e-9), prev_G = set.G(1e-9);
            for (int k = 1; k <= 90; ++k) {
                const double t = std::pow(10.0, -9.0 + 0.1 * k);
                const double lf = set.log_f(t), G = set.G(t);
                CHECK(std::isfinite(set.log_F(t)));
                CHECK(G >= mu - 1e-12);
                CHECK(G <= prev_G + 1e-12);
                if (set.weight_class().kind == Kind::P) CHECK(lf <= prev_f + 1e-12);
                else CHECK(lf >= prev_f - 1e-12);
                const double lhs = p * set.log_g(t);
                const double rhs = (p - 1.0) * (std::log(set.params().conjugate()) + lf);
                CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
                prev_f = lf;
                prev_G = G;
            }
            CHECK(set.log_F(1e-9) < set.log_F(1.0) - std::log(10.0));
        }
    }
}

TEST_CASE("integrability of 1/F, 1/(FG), 1/(FG^2)") {
    for (const auto& w : builtin_weights(2.0)) {
        INFO(w.name);
        const auto set = build_transforms(w, params(2.0, 1.0, 1.0));
        auto probe = [&](int power) {
            const quadrature::LogIntegrand f = [&](double t) {
                return LogValue::from_log(-set.log_F(t) - power * std::log(set.G(t)));
            };
            return quadrature::probe_divergence(f, 1.0).verdict;
        };
        CHECK(probe(0) == quadrature::Verdict::divergent);
        CHECK(probe(1) == quadrature::Verdict::divergent);
        CHECK(probe(2) == quadrature::Verdict::convergent);
    }
}

TEST_CASE("derivative identities") {
    const std::vector<double> grid = {0.01, 0.1, 0.3, 0.5, 0.8};
    for (const auto& w : builtin_weights(2.0)) {
        INFO(w.name);
        const auto set = build_transforms(w, params(2.0, 1.0, 1.0));
        const auto report = check_derivative_identities(set, grid, 1e-6);
        CHECK(report.rows.size() == 4 * grid.size());
        for (const auto& row : report.rows) {
            INFO(row.identity << " t=" << row.t << " residual=" << row.residual);
            CHECK(row.pass);
        }
    }
    const auto w = WeightSpec::exp_inv_pow(-1, 0.5, 2.0);
    const auto r = check_derivative_identities(build_transforms(w, params(2.0, 1.0, 1.0)), {0.1}, 1e-6);
    CHECK(r.all_pass());
}

TEST_CASE("errors") {
    const auto set = build_transforms(WeightSpec::constant(2.0), params(2.0, 1.0, 1.0));
    CHECK_THROWS_AS(set.eval(Which::f, 0.0), DomainError);
    CHECK_THROWS_AS(build_transforms(WeightSpec::constant(2.0), params(2.0, 1.0, -1.0)), PreconditionError);
    CHECK_THROWS_AS(build_transforms(WeightSpec::constant(2.0), params(3.0, 1.0, 1.0)), PreconditionError);
}
