#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "support.hpp"
#include "symp/errors.hpp"
#include "symp/pathindex.hpp"

using namespace symp;
using namespace testsupport;
using std::numbers::pi;

namespace {

GeneratedPath constant(const Mat& H, int steps = 1000) {
    GeneratedPath g;
    g.m = static_cast<int>(H.rows()) / 2;
    g.samples = {{0.0, H}, {1.0, H}};
    g.steps = steps;
    return g;
}

GeneratedPath rotation(double lambda, int m = 1) { return constant(2 * pi * lambda * Mat::Identity(2 * m, 2 * m)); }

Mat shear_form() {
    Mat Q = Mat::Zero(2, 2);
    Q(0, 0) = 1;  // p^2 / 2
    return Q;
}

Mat pq_form() {
    Mat Q = Mat::Zero(2, 2);
    Q(0, 1) = Q(1, 0) = 1;
    return Q;
}

}  // namespace

TEST_CASE("integrate") {
    auto zero = integrate(constant(Mat::Zero(2, 2), 50));
    for (const auto& A : zero.matrices) CHECK((A - Mat::Identity(2, 2)).norm() == 0);

    auto full = integrate(rotation(1.0));
    CHECK((full.matrices.back() - Mat::Identity(2, 2)).norm() < 1e-8);
    for (const auto& A : full.matrices) CHECK(check_symplectic(A).defect < 1e-8);

    Mat H = pq_form() * 1.3;
    auto hyp = integrate(constant(H));
    Mat exact = (standard_J(1) * H).exp();
    CHECK((hyp.matrices.back() - exact).norm() < 1e-8);
}

TEST_CASE("mean index examples") {
    CHECK(mean_index(integrate(rotation(0.3))) == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(mean_index(integrate(rotation(-0.25))) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(mean_index(integrate(constant(Mat::Zero(2, 2)))) == 0.0);
}

TEST_CASE("mean index rejects coarse sampling") {
    SampledPath p;
    p.m = 1;
    p.times = {0.0, 1.0};
    Mat R(2, 2);
    R << std::cos(2.0), -std::sin(2.0), std::sin(2.0), std::cos(2.0);
    p.matrices = {Mat::Identity(2, 2), R};
    CHECK_THROWS_AS(mean_index(p), UnwrapError);
}

TEST_CASE("Robbin-Salamon examples") {
    auto small = rs_index(constant(0.01 * Mat::Identity(2, 2)));
    CHECK(small.index == 1.0);
    REQUIRE(small.crossings.size() == 1);
    CHECK(small.crossings[0].tau == 0.0);
    CHECK(small.crossings[0].crossing_signature == 2);

    CHECK_THROWS_AS(rs_index(constant(Mat::Zero(2, 2))), DegeneracyError);

    auto half = rs_index(rotation(0.5));
    CHECK(half.index == 1.0);
    CHECK(half.crossings.size() == 1);
}

TEST_CASE("Conley-Zehnder examples") {
    CHECK(cz_index(integrate(rotation(0.3))) == 1);
    CHECK(cz_index(integrate(rotation(1.5))) == 3);
    CHECK(cz_index(integrate(constant(pq_form()))) == 0);
    CHECK_THROWS_AS(cz_index(integrate(constant(Mat::Zero(2, 2)))), DegeneracyError);
}

TEST_CASE("mu_pm examples") {
    auto id = mu_pm(constant(Mat::Zero(2, 2)));
    CHECK(id.minus == -1);
    CHECK(id.plus == 1);
    CHECK(id.kernel_dim == 2);
    CHECK(id.gap_consistent);

    auto sh = mu_pm(constant(shear_form()));
    CHECK(sh.minus == 0);
    CHECK(sh.plus == 1);

    auto r = mu_pm(rotation(0.3));
    CHECK(r.minus == 1);
    CHECK(r.plus == 1);
}

TEST_CASE("nullity examples") {
    CHECK(nullity(integrate(constant(Mat::Zero(2, 2)))) == 1);
    CHECK(nullity(integrate(rotation(0.3))) == 0);
    CHECK(nullity(integrate(constant(shear_form()))) == 1);
}

TEST_CASE("rho samples: parallel equals serial") {
    std::mt19937_64 rng(5);
    auto path = integrate(random_generated_path(rng, 3, 2.0));
    auto a = rho_samples_serial(path, kDefaultTol);
    auto b = rho_samples_parallel(path, kDefaultTol);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("property: mean index homogeneity") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        auto path = integrate(random_generated_path(rng, 1 + trial % 3, 0.6));
        const double base = mean_index(path);
        for (int k = 2; k <= 5; ++k) CHECK(std::abs(mean_index(iterate_path(path, k)) - k * base) < 1e-6);
    }
}

TEST_CASE("property: RS equals CZ and the sandwich holds") {
    std::mt19937_64 rng(22);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + trial % 3;
        auto gen = random_generated_path(rng, m, 1.5);
        auto path = integrate(gen);
        int cz = 0;
        try {
            cz = cz_index(path);
        } catch (const DegeneracyError&) {
            continue;
        }
        auto rs = rs_index(gen, path);
        CHECK(rs.index == static_cast<double>(cz));
        ++compared;
        auto mp = mu_pm(gen);
        const double mean = mean_index(path);
        CHECK(mean - m - 1e-9 <= mp.minus);
        CHECK(mp.minus <= mp.plus);
        CHECK(mp.plus <= mean + m + 1e-9);
    }
    CHECK(compared >= 190);
}

TEST_CASE("property: positive definite Hamiltonian is monotone") {
    for (int m = 1; m <= 2; ++m) {
        double prev = -1e9;
        for (double T = 0.25; T <= 20.0; T += 0.25) {
            auto gen = constant(T * Mat::Identity(2 * m, 2 * m), 2000);
            auto rs = rs_index(gen);
            CHECK(rs.index >= prev);
            prev = rs.index;
            CHECK(mu_pm(gen).minus >= m);
        }
    }
}

TEST_CASE("property: inverse path negates and swaps mu_pm") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        GeneratedPath gen;
        if (trial % 2 == 0) {
            gen = random_generated_path(rng, 1 + trial % 3, 1.5);
        } else {
            // Degenerate endpoints make the swap visible.
            ModelOptions o;
            o.degenerate_prob = 0.8;
            o.max_loop = 1;
            gen = model_to_path(random_model(rng, o), 400);
        }
        auto a = mu_pm(gen);
        auto b = mu_pm(time_reversed_inverse(gen));
        CHECK(b.minus == -a.plus);
        CHECK(b.plus == -a.minus);
    }
}

TEST_CASE("property: numeric indices match the exact model") {
    std::mt19937_64 rng(24);
    ModelOptions o;
    o.max_loop = 1;
    for (int trial = 0; trial < 200; ++trial) {
        OrbitModel model = random_model(rng, o);
        auto rep = full_report(model_to_path(model, 400));
        auto exact = mu_pm(model, 1);
        CHECK(std::abs(rep.mean_index - mean_index(model, 1).value()) < 1e-6);
        REQUIRE(rep.mu_minus.has_value());
        CHECK(*rep.mu_minus == exact.minus);
        CHECK(*rep.mu_plus == exact.plus);
        CHECK(rep.nullity == nullity(model, 1));
    }
}
