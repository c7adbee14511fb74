#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "hardy/errors.hpp"
#include "hardy/test_function.hpp"

using namespace hardy;

namespace {

LogValue one(double, const PointValue&) { return LogValue{0.0, 1}; }
LogValue identity_u(double, const PointValue& v) { return v.u; }
LogValue square_u(double, const PointValue& v) { return v.u * v.u; }

class Square : public Profile {
public:
    PointValue at(double y) const override {
        return {LogValue{2.0 * y, 1}, LogValue{std::log(2.0) + y, 1}};
    }
};

}  // namespace

TEST_CASE("linear ramp reaches zero through the improper tail") {
    const auto u = TestFunction::piecewise_linear({0.5, 1.0}, {0.5, 1.0});
    CHECK(u.improper_tail());
    CHECK(u.support_floor() == 0.0);
    CHECK(u.at(0.25).u.to_double() == doctest::Approx(0.25));
    CHECK(u.at(0.25).du.to_double() == doctest::Approx(1.0));
    CHECK(u.integrate(one).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(u.integrate(square_u).value == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("leading zeros set the support floor") {
    const auto u = TestFunction::piecewise_linear({0.1, 0.2, 0.6, 1.0}, {0.0, 0.0, 1.0, 0.5});
    CHECK_FALSE(u.improper_tail());
    CHECK(u.support_floor() == 0.2);
    CHECK(u.at(0.15).u.is_zero());
    CHECK(u.integrate(identity_u).value == doctest::Approx(0.2 + 0.3).epsilon(1e-10));
}

TEST_CASE("sign changes inside a segment integrate exactly") {
    const auto u = TestFunction::piecewise_linear({0.5, 1.0}, {-1.0, 1.0});
    CHECK(u.integrate(identity_u).value == doctest::Approx(-0.25).epsilon(1e-10));
    const auto v = TestFunction::piecewise_linear({0.25, 0.5, 1.0}, {0.0, -1.0, 1.0});
    CHECK(std::fabs(v.integrate(identity_u).value - (-0.125)) < 1e-10);
}

TEST_CASE("clipping inserts crossing nodes") {
    const auto u = TestFunction::piecewise_linear({0.5, 1.0}, {0.5, 1.0});
    const auto c = u.clipped(0.5);
    CHECK_FALSE(c.improper_tail());
    CHECK(c.support_floor() == doctest::Approx(0.5));
    CHECK(c.integrate(identity_u).value == doctest::Approx(0.125).epsilon(1e-10));
    const auto c2 = u.clipped(0.25);
    CHECK(c2.grid().front() == doctest::Approx(0.25));
    CHECK(c2.integrate(identity_u).value == doctest::Approx(0.5 * 0.75 * 0.75).epsilon(1e-10));
    CHECK_THROWS_AS(u.clipped(-1.0), PreconditionError);
}

TEST_CASE("scaling multiplies values") {
    const auto u = TestFunction::piecewise_linear({0.5, 1.0}, {0.5, 1.0}).scaled(3.0);
    CHECK(u.boundary_value() == doctest::Approx(3.0));
    CHECK(u.integrate(one).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(u.integrate(identity_u).value == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("exact profiles") {
    const auto u = TestFunction::from_profile(std::make_shared<Square>(), {0.25, 0.5, 1.0}, 0.0);
    CHECK(u.improper_tail());
    CHECK(u.at(0.5).u.to_double() == doctest::Approx(0.25));
    CHECK(u.at(0.5).du.to_double() == doctest::Approx(1.0));
    CHECK(u.integrate(identity_u).value == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    const auto w = TestFunction::from_profile(std::make_shared<Square>(), {0.5, 1.0}, 0.5);
    CHECK(w.integrate(identity_u).value == doctest::Approx((1.0 - 0.125) / 3.0).epsilon(1e-10));
    CHECK(w.scaled(2.0).boundary_value() == doctest::Approx(2.0));
}

TEST_CASE("invalid data is rejected") {
    CHECK_THROWS_AS(TestFunction::piecewise_linear({}, {}), PreconditionError);
    CHECK_THROWS_AS(TestFunction::piecewise_linear({0.5, 0.4}, {1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(TestFunction::piecewise_linear({0.0, 1.0}, {0.0, 1.0}), PreconditionError);
    const auto u = TestFunction::piecewise_linear({0.5, 1.0}, {0.5, 1.0});
    CHECK_THROWS_AS(u.at(2.0), DomainError);
}
