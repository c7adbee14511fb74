#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hardy/errors.hpp"
#include "hardy/extremals.hpp"
#include "hardy/variational.hpp"

using namespace hardy;

namespace {

TransformParams params(double p, double eta = 1.0, double mu = 1.0) {
    TransformParams tp;
    tp.p = p;
    tp.eta = eta;
    tp.mu = mu;
    return tp;
}

bool non_increasing(const std::vector<double>& h) {
    for (std::size_t i = 1; i < h.size(); ++i)
        if (h[i] > h[i - 1] * (1.0 + 1e-12)) return false;
    return true;
}

// u_eps restricted to the mesh, vanishing at t_floor.
double witness(const TransformSet& set, const Mesh& mesh, double eps) {
    const PowerOfF u(set, 1.0 / set.params().conjugate() + set.switching_sign() * eps);
    std::vector<double> ls(mesh.n());
    for (std::size_t i = 0; i < mesh.n(); ++i) ls[i] = u.at(std::log(mesh.nodes[i])).u.log_abs;
    std::vector<double> v(mesh.n(), 1.0);
    v[0] = 0.0;
    return DiscreteQuotient(set, mesh, ls).value(v);
}

}  // namespace

TEST_CASE("meshes") {
    const Mesh m = log_mesh(1e-4, 2.0, 9);
    CHECK(m.nodes.front() == 1e-4);
    CHECK(m.nodes.back() == 2.0);
    CHECK(m.nodes[4] == doctest::Approx(std::sqrt(2e-4)));
    const Mesh g = geometric_mesh(1e-3, 1.0, 11, 1.5);
    CHECK(g.nodes.back() == 1.0);
    CHECK((g.nodes[2] - g.nodes[1]) / (g.nodes[1] - g.nodes[0]) == doctest::Approx(1.5));
    CHECK_THROWS_AS(log_mesh(0.0, 1.0, 10), DomainError);
    CHECK_THROWS_AS(log_mesh(1e-3, 1.0, 2), DomainError);
    const auto set = build_transforms(WeightSpec::constant(2.0), params(2.0));
    CHECK_THROWS_AS(minimize_quotient(set, log_mesh(1e-3, 2.0, 20)), DomainError);
    Mesh bad = m;
    bad.nodes[3] = bad.nodes[2];
    CHECK_THROWS_AS(DiscreteQuotient(set, bad, std::vector<double>(bad.n(), 0.0)), DomainError);
}

TEST_CASE("Rayleigh quotient of the extremal family") {
    for (double p : {1.5, 2.0, 3.0}) {
        for (const auto& spec : {WeightSpec::constant(p), t_squared(p)}) {
            const auto set = build_transforms(spec, params(p));
            const auto a = analytic_extremal(set, 0.1);
            const double lam = std::pow(set.params().lambda_p(), 1.0 / set.params().conjugate());
            const double expected = (a.energy - set.switching_sign() * lam * a.boundary) / a.hardy;
            CHECK(rayleigh_quotient(extremal_profile(set, 0.1), set) == doctest::Approx(expected).epsilon(1e-8));
        }
    }
    const auto set = build_transforms(WeightSpec::constant(2.0), params(2.0));
    const auto zero = TestFunction::piecewise_linear({0.5, 1.0}, {0.0, 0.0});
    CHECK_THROWS_AS(rayleigh_quotient(zero, set), DomainError);
}

TEST_CASE("analytic gradient against finite differences") {
    const Mesh mesh = log_mesh(1e-3, 1.0, 200);
    std::vector<double> ls(mesh.n());
    for (std::size_t i = 0; i < mesh.n(); ++i) ls[i] = 0.3 * std::log(mesh.nodes[i]);
    for (double p : {1.5, 2.0, 3.0}) {
        for (const auto& spec : builtin_weights(p)) {
            const auto set = build_transforms(spec, params(p));
            const Mesh m = log_mesh(default_t_floor(set, 1e-3), 1.0, 200);
            const DiscreteQuotient q(set, m, ls);
            const auto check = check_gradient(q, 20, 11);
            CHECK(check.points == 20);
            CHECK_MESSAGE(check.worst_relative_error <= 1e-6, spec.name << " p=" << p);
        }
    }
}

TEST_CASE("constant weight, p = 2, 4096 nodes") {
    const auto set = build_transforms(WeightSpec::constant(2.0), params(2.0));
    const Mesh mesh = log_mesh(1e-6, 1.0, 4096);
    const auto r = minimize_quotient(set, mesh);
    CHECK(r.converged);
    CHECK(r.value >= 0.25);
    CHECK(r.value <= 0.30);
    CHECK(non_increasing(r.history));
    CHECK(r.history.back() == r.value);
    CHECK(rayleigh_quotient(r.minimizer, set) == doctest::Approx(r.value).epsilon(1e-9));

    const auto dirichlet = minimize_quotient(set, mesh, {Boundary::pinned, 0.0});
    CHECK(dirichlet.value > r.value);
    const auto fixed_end = minimize_quotient(set, log_mesh(1e-6, 1.0, 512), {Boundary::pinned, 1.0});
    const auto free_end = minimize_quotient(set, log_mesh(1e-6, 1.0, 512));
    CHECK(fixed_end.value == doctest::Approx(free_end.value).epsilon(1e-6));
    CHECK(fixed_end.minimizer.boundary_value() > 0.0);
}

TEST_CASE("lower bound and upper witnesses for every built-in weight") {
    for (double p : {1.5, 2.0, 3.0}) {
        const double lambda = params(p).lambda_p();
        for (const auto& spec : builtin_weights(p)) {
            const auto set = build_transforms(spec, params(p));
            const Mesh mesh = log_mesh(default_t_floor(set), 1.0, 512);
            const auto r = minimize_quotient(set, mesh);
            INFO(spec.name << " p=" << p);
            CHECK(r.converged);
            CHECK(non_increasing(r.history));
            CHECK(r.value >= lambda - 1e-9);
            for (double eps : {0.2, 0.1, 0.05, 0.02}) CHECK(r.value <= witness(set, mesh, eps));
        }
    }
}

TEST_CASE("refining t_floor lowers the minimum") {
    const auto set = build_transforms(WeightSpec::constant(3.0), params(3.0));
    double previous = kPosInf;
    for (double floor : {1e-2, 1e-4, 1e-6}) {
        const auto r = minimize_quotient(set, log_mesh(floor, 1.0, 600));
        CHECK(r.value < previous);
        previous = r.value;
    }
}

TEST_CASE("vanishing infimum on a P-class weight") {
    const auto tp = params(2.0);
    const auto rows = infimum_zero_demo(t_squared(2.0), tp,
                                        {log_mesh(1e-2, 1.0, 2000), log_mesh(1e-3, 1.0, 2000), log_mesh(1e-4, 1.0, 2000)});
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].t_floor == 1e-3);
    CHECK(rows[1].minimum <= 1.0 / (1.0 / 1e-3 - 2.0));
    CHECK(rows[1].minimum <= 1.01e-3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].log_minimum >= rows[i].log_continuum_minimum - 1e-12);
        CHECK(rows[i].log_minimum <= rows[i].log_vanishing_energy);
        if (i > 0) CHECK(rows[i].minimum < rows[i - 1].minimum);
    }
    // Exponentially small minima stay available as logs.
    const auto tiny = infimum_zero_demo(WeightSpec::exp_inv_pow(-1, 1.0, 2.0), tp, {log_mesh(1e-3, 1.0, 400)});
    CHECK(tiny[0].log_minimum < -500.0);
    CHECK(tiny[0].log_minimum >= tiny[0].log_continuum_minimum - 1e-9);
    CHECK_THROWS_AS(infimum_zero_demo(WeightSpec::constant(2.0), tp, {log_mesh(1e-3, 1.0, 50)}), PreconditionError);
}
