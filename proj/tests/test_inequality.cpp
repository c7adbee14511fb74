#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hardy/errors.hpp"
#include "hardy/identities.hpp"
#include "hardy/inequality.hpp"

using namespace hardy;

namespace {

TransformParams params(double p, double eta = 1.0, double mu = 1.0) {
    TransformParams tp;
    tp.p = p;
    tp.eta = eta;
    tp.mu = mu;
    return tp;
}

TestFunction random_function(std::mt19937_64& rng, double eta = 1.0) {
    std::uniform_int_distribution<int> count(8, 24);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = count(rng);
    const double lo = eta * std::pow(10.0, -1.0 - 3.0 * unit(rng));
    std::vector<double> grid, values;
    for (int i = 0; i < n; ++i) {
        grid.push_back(lo * std::pow(eta / lo, static_cast<double>(i) / (n - 1)));
        values.push_back(i == 0 ? 0.0 : unit(rng));
    }
    grid.back() = eta;
    return TestFunction::piecewise_linear(grid, values);
}

}  // namespace

TEST_CASE("u = t with w = 1, p = 2") {
    const auto set = build_transforms(WeightSpec::constant(2.0), params(2.0));
    const auto u = TestFunction::piecewise_linear({0.5, 1.0}, {0.5, 1.0});
    const auto terms = hardy_terms(u, set);
    CHECK(terms.energy == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(terms.hardy == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(terms.boundary == doctest::Approx(1.0).epsilon(1e-10));
    const auto r = report_nct1(u, set);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.rhs == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(r.pass);
    CHECK(r.term("boundary") == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("power corollary below the critical exponent") {
    const auto u = TestFunction::piecewise_linear({0.5, 1.0}, {0.5, 1.0});
    CorollaryParams cp;
    cp.p = 2.0;
    cp.alpha = 0.0;
    const auto r = corollary_check(Corollary::B, u, cp);
    CHECK(r.report.lhs == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.report.rhs == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(r.cross_check_residual < 1e-8);
}

TEST_CASE("homogeneity of degree p") {
    const auto set = build_transforms(WeightSpec::exp_inv_pow(-1, 0.5, 3.0), params(3.0));
    const auto u = TestFunction::piecewise_linear({0.1, 0.4, 1.0}, {0.0, 1.0, 0.3});
    const auto a = hardy_terms(u, set), b = hardy_terms(u.scaled(2.0), set);
    CHECK(b.energy == doctest::Approx(8.0 * a.energy).epsilon(1e-9));
    CHECK(b.hardy == doctest::Approx(8.0 * a.hardy).epsilon(1e-9));
    CHECK(b.remainder == doctest::Approx(8.0 * a.remainder).epsilon(1e-9));
    CHECK(b.boundary == doctest::Approx(8.0 * a.boundary).epsilon(1e-9));
}

TEST_CASE("truncation lowers every integral") {
    const auto set = build_transforms(WeightSpec::power(0.5, 2.0), params(2.0));
    const auto u = TestFunction::piecewise_linear({0.01, 0.3, 1.0}, {0.0, 1.0, 0.6});
    const auto a = hardy_terms(u, set), b = hardy_terms(u.clipped(0.5), set);
    CHECK(b.energy <= a.energy);
    CHECK(b.hardy <= a.hardy);
}

TEST_CASE("remainder forms hold on random functions") {
    std::mt19937_64 rng(7);
    for (const double p : {1.5, 2.0, 3.0}) {
        for (const auto& spec : {WeightSpec::exp_inv_pow(-1, 0.5, p), WeightSpec::exp_inv_pow(1, 0.5, p),
                                 WeightSpec::power(2.0 / (p / (p - 1.0)), p)}) {
            const auto set = build_transforms(spec, params(p));
            const double M = std::max(2.0, 4.0 / (p - 1.0));
            for (int k = 0; k < 4; ++k) {
                const auto u = random_function(rng);
                const auto t = hardy_terms(u, set);
                const auto n1 = report_nct1(t, set);
                const auto n2 = report_nct2(t, set, remainder_constants(set, M));
                CHECK_MESSAGE(n1.pass, spec.describe(), " p=", p, " slack=", n1.slack);
                CHECK_MESSAGE(n2.pass, spec.describe(), " p=", p, " slack=", n2.slack);
            }
        }
    }
}

TEST_CASE("remainder constants") {
    const auto set = build_transforms(WeightSpec::exp_inv_pow(-1, 0.5, 2.0), params(2.0));
    const auto k = remainder_constants(set, 2.0);
    CHECK(k.c == 1.0);
    CHECK(k.d == doctest::Approx(2.0));
    CHECK(k.C == doctest::Approx(2.0 * 0.5 / 4.0));
    const auto q = build_transforms(WeightSpec::exp_inv_pow(1, 0.5, 2.0), params(2.0));
    const auto kq = remainder_constants(q, 2.0);
    CHECK(kq.d_used <= 1.0);
    CHECK(kq.L > 0.0);
    const auto s15 = build_transforms(WeightSpec::exp_inv_pow(-1, 0.5, 1.5), params(1.5));
    CHECK_THROWS_AS(remainder_constants(s15, 2.0), PreconditionError);
    CHECK_NOTHROW(remainder_constants(s15, 8.0));
}

TEST_CASE("two-sided remainder form on an admissible weight") {
    const auto set = build_transforms(WeightSpec::exp_inv_pow(-1, 0.5, 2.0), params(2.0));
    REQUIRE(set.weight_class().admissible);
    const double K = *set.weight_class().admissibility_constant_K;
    const auto k = remainder_constants(set, 2.0);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 4; ++i) {
        const auto u = random_function(rng);
        const auto r = report_c1(u, set, k.C / 2.0, 1e-3 * k.C / (K * K), k.L);
        CHECK_MESSAGE(r.pass, "slack=", r.slack);
    }
    const auto bad = build_transforms(WeightSpec::power(0.5, 2.0), params(2.0));
    if (!bad.weight_class().admissible) {
        CHECK_THROWS_AS(report_c1(random_function(rng), bad, 1.0, 1.0, 1.0), PreconditionError);
    }
}

TEST_CASE("corollaries agree with the transform form") {
    std::mt19937_64 rng(11);
    for (const double p : {1.5, 2.0, 3.0}) {
        const double pc = p / (p - 1.0);
        const auto u = random_function(rng);
        CorollaryParams cp;
        cp.p = p;
        cp.mu = 1.5;
        for (const auto& [which, alpha, R] :
             {std::tuple{Corollary::D, 0.0, 0.0}, std::tuple{Corollary::G, 0.0, 0.0},
              std::tuple{Corollary::F, 1.0 / pc + 0.4, 0.0}, std::tuple{Corollary::E, 0.0, 5.0},
              std::tuple{Corollary::B, 1.0 / pc - 0.3, 0.0}}) {
            cp.alpha = alpha;
            cp.R = R;
            const auto r = corollary_check(which, u, cp);
            CHECK_MESSAGE(r.report.pass, std::string(to_string(which)), " p=", p, " slack=", r.report.slack, " lhs=", r.report.lhs);
            CHECK_MESSAGE(r.cross_check_residual < 1e-8, to_string(which), " p=", p, " residual=",
                          r.cross_check_residual);
        }
    }
    CorollaryParams cp;
    cp.R = 2.0;
    CHECK_THROWS_AS(corollary_check(Corollary::E, random_function(rng), cp), PreconditionError);
    cp.alpha = 0.9;
    CHECK_THROWS_AS(corollary_check(Corollary::B, random_function(rng), cp), PreconditionError);
}

TEST_CASE("monotone comparison") {
    const auto set = build_transforms(WeightSpec::exp_inv_pow(1, 1.0, 2.0), params(2.0));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5; ++i) {
        const auto u = random_function(rng);
        const auto r1 = monotone_comparison(u, set, [](double) { return 1.0; });
        CHECK(std::fabs(r1.slack) <= 1e-10 * std::max(1.0, std::fabs(r1.lhs)));
        const auto r2 = monotone_comparison(u, set, [](double t) { return t * t; });
        CHECK_MESSAGE(r2.pass, "slack=", r2.slack);
    }
    CHECK_THROWS_AS(monotone_comparison(random_function(rng), set, [](double t) { return 1.0 - t; }),
                    PreconditionError);
    const auto p_set = build_transforms(WeightSpec::exp_inv_pow(-1, 1.0, 2.0), params(2.0));
    CHECK_THROWS_AS(monotone_comparison(random_function(rng), p_set, [](double) { return 1.0; }),
                    PreconditionError);
}
