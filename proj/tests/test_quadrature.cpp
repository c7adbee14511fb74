#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hardy/errors.hpp"
#include "hardy/quadrature.hpp"

using namespace hardy;
using namespace hardy::quadrature;

TEST_CASE("inverse square root with singular endpoint") {
    const auto r = integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0, 1e-10, true);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 2.0) < 1e-9);
}

TEST_CASE("log singularity") {
    const auto r = integrate([](double t) { return -std::log(t); }, 0.0, 1.0, 1e-10, true);
    CHECK(std::fabs(r.value - 1.0) < 1e-9);
}

TEST_CASE("exponential of 1/s on [0.05, 1]") {
    const LogIntegrand f = [](double s) { return LogValue::from_log(1.0 / s); };
    Options o;
    o.singular_left = true;
    const auto r = integrate(f, 0.05, 1.0, o);
    CHECK(r.converged);
    CHECK(relative_difference(r.value, 1357393.716731085678530332444007136659016) < 1e-9);
}

TEST_CASE("values beyond the double range stay in log form") {
    const LogIntegrand f = [](double s) { return LogValue::from_log(1.0 / s); };
    Options o;
    o.singular_left = true;
    const auto r = integrate(f, 1e-3, 2e-3, o);
    CHECK(r.converged);
    // Asymptotic expansion a^2 e^{1/a} (1 + 2a + 6a^2 + ...), a = 1e-3.
    const double a = 1e-3;
    const double expected = 1.0 / a + 2.0 * std::log(a) + std::log(1.0 + 2.0 * a + 6.0 * a * a);
    CHECK(std::fabs(r.log_abs - expected) < 1e-7);
}

TEST_CASE("linearity and additivity") {
    const auto f = [](double t) { return std::sin(3.0 * t) + 2.0; };
    const auto g = [](double t) { return std::exp(-t) * t; };
    const auto ff = integrate(f, 0.0, 2.0, 1e-12, false).value;
    const auto gg = integrate(g, 0.0, 2.0, 1e-12, false).value;
    const auto both = integrate([&](double t) { return 2.5 * f(t) + g(t); }, 0.0, 2.0, 1e-12, false).value;
    CHECK(std::fabs(both - (2.5 * ff + gg)) < 1e-10);
    const auto left = integrate(f, 0.0, 0.7, 1e-12, false).value;
    const auto right = integrate(f, 0.7, 2.0, 1e-12, false).value;
    CHECK(std::fabs(left + right - ff) < 1e-10);
}

TEST_CASE("integrals of e^{-1/s} and e^{-1/sqrt s}") {
    const auto a = integrate([](double s) { return std::exp(-1.0 / s); }, 0.0, 1.0, 1e-12, true);
    CHECK(relative_difference(a.value, 0.1484955067759220479183599947013392184148) < 1e-10);
    const auto b = integrate([](double s) { return std::exp(-1.0 / std::sqrt(s)); }, 0.0, 1.0, 1e-12, true);
    CHECK(relative_difference(b.value, 0.219383934395520273677163775460121649031) < 1e-10);
    const auto c = integrate([](double s) { return std::exp(1.0 / std::sqrt(s)); }, 0.1, 1.0, 1e-12, true);
    CHECK(relative_difference(c.value, 4.790157074084685343322646264793832331359) < 1e-10);
}

TEST_CASE("integration to minus infinity") {
    // int_{-inf}^0 e^{y} dy = 1
    const auto r = integrate_to_minus_infinity([](double y) { return LogValue::from_log(y); }, 0.0);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 1.0) < 1e-10);
    // int_{-inf}^{-800} e^{2y} dy = e^{-1600}/2, far below double range
    const auto s = integrate_to_minus_infinity([](double y) { return LogValue::from_log(2.0 * y); }, -800.0);
    CHECK(std::fabs(s.log_abs - (-1600.0 - std::log(2.0))) < 1e-9);
}

TEST_CASE("non-finite integrands are reported") {
    CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, 0.0, 1.0, 1e-8, false), EvaluationError);
    CHECK_THROWS_AS(integrate([](double t) { return t; }, 1.0, 0.5, 1e-8, false), DomainError);
}

TEST_CASE("divergence probe") {
    const auto inv = probe_divergence([](double t) { return LogValue::from_log(-std::log(t)); }, 1.0);
    CHECK(inv.verdict == Verdict::divergent);
    const auto one = probe_divergence([](double) { return LogValue::from_log(0.0); }, 1.0);
    CHECK(one.verdict == Verdict::convergent);
    CHECK(std::fabs(one.value - 1.0) < 1e-6);
    const auto expo = probe_divergence([](double s) { return LogValue::from_log(1.0 / s); }, 1.0);
    CHECK(expo.verdict == Verdict::divergent);
    const auto root = probe_divergence([](double t) { return LogValue::from_log(-0.5 * std::log(t)); }, 1.0);
    CHECK(root.verdict == Verdict::convergent);
    CHECK(std::fabs(root.value - 2.0) < 1e-6);
    for (std::size_t i = 1; i < inv.probe_trace.size(); ++i) {
        CHECK(inv.probe_trace[i].epsilon < inv.probe_trace[i - 1].epsilon);
    }
}
