#include <doctest.h>

#include "fixsim/geometry.hpp"
#include "fixsim/random.hpp"
#include "oracles.hpp"

using namespace fixsim;

namespace {

Vec3 random_vec(Rng& rng, double scale) {
    return {rng.uniform(-scale, scale), rng.uniform(-scale, scale), rng.uniform(-scale, scale)};
}

UnitVec3 random_unit(Rng& rng) {
    for (;;) {
        const Vec3 v = random_vec(rng, 1.0);
        if (v.norm() > 1e-3) {
            return normalized(v);
        }
    }
}

}  // namespace

TEST_CASE("clamp") {
    CHECK(clamp(3, 5, 100) == 5);
    CHECK(clamp(50, 5, 100) == 50);
    CHECK(clamp(200, 5, 100) == 100);
    CHECK_THROWS_AS(clamp(0, 10, 5), std::invalid_argument);
}

TEST_CASE("rotate_about_axis canonical") {
    const Vec3 r = rotate_about_axis({1, 0, 0}, {0, 0, 1}, kPi / 2);
    CHECK(r.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.z == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rotate_about_axis identity at zero angle") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const Vec3 v = random_vec(rng, 50.0);
        const Vec3 r = rotate_about_axis(v, random_unit(rng), 0.0);
        CHECK((r - v).norm() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("rotate_about_axis matches quaternion-matrix oracle") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 v = random_vec(rng, 100.0);
        const UnitVec3 axis = random_unit(rng);
        const double angle = rng.uniform(-2.0 * kPi, 2.0 * kPi);
        const Vec3 got = rotate_about_axis(v, axis, angle);
        const Vec3 want = testing::quaternion_rotate(v, axis, angle);
        CHECK((got - want).norm() <= 1e-9 * std::max(1.0, v.norm()));
    }
}

TEST_CASE("rotation preserves norms and angles") {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const Vec3 a = random_vec(rng, 10.0);
        const Vec3 b = random_vec(rng, 10.0);
        if (a.norm() < 1e-6 || b.norm() < 1e-6) {
            continue;
        }
        const UnitVec3 axis = random_unit(rng);
        const double angle = rng.uniform(0.0, 2.0 * kPi);
        const Vec3 ra = rotate_about_axis(a, axis, angle);
        const Vec3 rb = rotate_about_axis(b, axis, angle);
        CHECK(ra.norm() == doctest::Approx(a.norm()).epsilon(1e-9));
        CHECK(angle_between(ra, rb) == doctest::Approx(angle_between(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("rotate_about_axis rejects non-unit axis") {
    CHECK_THROWS_AS(rotate_about_axis({1, 0, 0}, {0, 0, 2}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(rotate_about_axis({1, 0, 0}, {0, 0, 0}, 0.5), std::invalid_argument);
}

TEST_CASE("orthonormal_basis is right-handed and orthonormal") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const UnitVec3 d = random_unit(rng);
        const auto [u, v] = orthonormal_basis(d);
        CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(dot(u, v)) < 1e-12);
        CHECK(std::abs(dot(u, d)) < 1e-12);
        CHECK((cross(u, v) - d).norm() < 1e-12);
    }
}

TEST_CASE("angle helpers") {
    CHECK(angle_between({1, 0, 0}, {0, 1, 0}) == doctest::Approx(kPi / 2));
    CHECK(angle_to_line({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(0.0));
    CHECK(angle_to_line({1, 1, 0}, {0, 1, 0}) == doctest::Approx(kPi / 4));
    CHECK_THROWS_AS(angle_between({0, 0, 0}, {1, 0, 0}), std::invalid_argument);
}
