#include <doctest.h>

#include <cmath>
#include <vector>

#include "symbridge/bosegas.hpp"
#include "symbridge/kernels.hpp"

using namespace symbridge;

namespace {
constexpr double kPi = 3.14159265358979323846;

Spectrum toy_spectrum() {
    Spectrum s;
    s.source = "analytic";
    for (int i = 0; i < 30; ++i) s.energies.push_back(1.0 + 1.7 * i);
    return s;
}
}  // namespace

TEST_SUITE_BEGIN("bosegas");

TEST_CASE("finite-difference spectrum of the unit box") {
    Grid g = Grid::make(1, {0.0}, {1.0}, {400});
    Spectrum s = spectrum(g, GridFunction::constant(g, 0.0), 5);
    CHECK(s.source == "finite-difference");
    for (int k = 1; k <= 5; ++k) {
        double exact = kPi * kPi * k * k;
        CHECK(std::fabs(s.energies[k - 1] - exact) / exact < 0.002);
    }
    Spectrum clipped = spectrum(g, GridFunction::constant(g, 0.0), 1000);
    CHECK(clipped.clipped);
    CHECK(static_cast<int>(clipped.energies.size()) == g.points());
}

TEST_CASE("constant potential shifts every level") {
    Grid g = Grid::make(1, {0.0}, {1.0}, {150});
    Spectrum s0 = spectrum(g, GridFunction::constant(g, 0.0), 6);
    Spectrum s7 = spectrum(g, GridFunction::constant(g, 7.5), 6);
    for (int k = 0; k < 6; ++k)
        CHECK(s7.energies[k] - s0.energies[k] == doctest::Approx(7.5).epsilon(1e-10));
}

TEST_CASE("two-dimensional box ground energy") {
    Grid g = Grid::make(2, {0.0, 0.0}, {1.0, 1.0}, {40, 40});
    Spectrum s = spectrum(g, GridFunction::constant(g, 0.0), 3);
    CHECK(std::fabs(s.energies[0] - 2.0 * kPi * kPi) / (2.0 * kPi * kPi) < 0.005);
}

TEST_CASE("analytic box spectrum") {
    Spectrum s = analytic_box_spectrum({1.0}, 5);
    for (int k = 1; k <= 5; ++k)
        CHECK(s.energies[k - 1] == doctest::Approx(kPi * kPi * k * k));
    Spectrum s2 = analytic_box_spectrum({1.0, 1.0}, 3);
    CHECK(s2.energies[0] == doctest::Approx(2.0 * kPi * kPi));
    CHECK(s2.energies[1] == doctest::Approx(5.0 * kPi * kPi));
    CHECK(s2.energies[2] == doctest::Approx(5.0 * kPi * kPi));
}

TEST_CASE("recursion reproduces the two- and three-particle identities") {
    Spectrum s = toy_spectrum();
    const double beta = 0.9;
    PartitionTable t = partition_recursion(s, beta, 3);
    CHECK(t.logz[0] == 0.0);
    double z1b = std::exp(log_z1(s, beta));
    double z12b = std::exp(log_z1(s, 2.0 * beta));
    double z13b = std::exp(log_z1(s, 3.0 * beta));
    CHECK(std::exp(t.logz[2]) ==
          doctest::Approx(0.5 * (z1b * z1b + z12b)).epsilon(1e-13));
    CHECK(std::exp(t.logz[3]) ==
          doctest::Approx((z1b * z1b * z1b + 3.0 * z1b * z12b + 2.0 * z13b) / 6.0)
              .epsilon(1e-13));
}

TEST_CASE("recursion equals the occupation-number sum for n <= 6") {
    Spectrum s = toy_spectrum();
    const double beta = 1.0;
    PartitionTable t = partition_recursion(s, beta, 6);
    for (int n = 1; n <= 6; ++n) {
        double bf = brute_force_trace(s, beta, n);
        CHECK(std::fabs(std::log(bf) - t.logz[n]) < 1e-12 * std::max(1.0, std::fabs(t.logz[n])));
    }
    CHECK(brute_force_trace(s, beta, 1) == doctest::Approx(std::exp(log_z1(s, beta))));
    CHECK_THROWS_AS(brute_force_trace(s, beta, 7), precondition_error);
}

TEST_CASE("closed form on a three-level spectrum") {
    Spectrum s;
    s.source = "analytic";
    s.energies = {1.0, 2.0, 3.0};
    const double beta = 1.0;
    // truncation guard intentionally bypassed by direct brute force
    double z1 = std::exp(-1.0) + std::exp(-2.0) + std::exp(-3.0);
    double z1_2b = std::exp(-2.0) + std::exp(-4.0) + std::exp(-6.0);
    CHECK(brute_force_trace(s, beta, 2) ==
          doctest::Approx(0.5 * (z1 * z1 + z1_2b)).epsilon(1e-14));
    // monotone decreasing in beta
    double prev = brute_force_trace(s, 0.5, 3);
    for (double b : {0.8, 1.2, 2.0, 3.5}) {
        double cur = brute_force_trace(s, b, 3);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("recursion equals the cycle-type sum for n <= 8") {
    Spectrum s = toy_spectrum();
    const double beta = 1.0;
    PartitionTable t = partition_recursion(s, beta, 8);
    for (int n = 1; n <= 8; ++n) {
        double cy = cycle_sum_log_trace(s, beta, n);
        CHECK(std::fabs(cy - t.logz[n]) < 1e-12 * std::max(1.0, std::fabs(cy)));
    }
}

TEST_CASE("insufficient truncation is rejected with an explicit error") {
    Spectrum s;
    s.source = "analytic";
    s.energies = {1.0, 1.5};  // tail e^{-beta (E_K - E_1)} far above 1e-16
    CHECK_THROWS_AS(partition_recursion(s, 1.0, 4), numerical_error);
}

TEST_CASE("unit-box LDP deviations") {
    Spectrum box = analytic_box_spectrum({1.0}, 5);
    PartitionTable t = partition_recursion(box, 1.0, 200);
    LdpReport rep = ldp_check(t, box, 1.0);
    CHECK(rep.target == doctest::Approx(-kPi * kPi));
    CHECK(rep.deviation[199] < 0.05);
    for (int N = 16; N < 200; ++N)
        CHECK(rep.deviation[N] <= rep.deviation[N - 1] + 1e-12);
    // a_N is eventually monotone
    for (int N = 100; N < 200; ++N) CHECK(rep.a[N] <= rep.a[N - 1] + 1e-12);
    CHECK(std::isfinite(rep.slope));
}

TEST_CASE("quadratic trap at beta = 1") {
    Grid g = Grid::make(1, {0.0}, {1.0}, {400});
    GridFunction W = GridFunction::constant(g, 0.0);
    for (int i = 0; i < g.points(); ++i) {
        double x = g.coord(i)[0];
        W[i] = 100.0 * (x - 0.5) * (x - 0.5);
    }
    Spectrum s = spectrum(g, W, 12);
    // ground energy: above the pure harmonic sqrt(c) = 10 (adding the walls
    // raises it), below the box-state variational bound; grid-converged
    CHECK(s.energies[0] > 10.0);
    CHECK(s.energies[0] < 23.0);
    Grid gf = Grid::make(1, {0.0}, {1.0}, {800});
    GridFunction Wf = GridFunction::constant(gf, 0.0);
    for (int i = 0; i < gf.points(); ++i) {
        double x = gf.coord(i)[0];
        Wf[i] = 100.0 * (x - 0.5) * (x - 0.5);
    }
    CHECK(std::fabs(spectrum(gf, Wf, 1).energies[0] - s.energies[0]) < 0.01);
    PartitionTable t = partition_recursion(s, 1.0, 200);
    double a200 = t.logz[200] / 200.0;
    CHECK(std::fabs(a200 + s.energies[0]) < 0.05);
}

TEST_CASE("spectrum is consistent with the principal eigenvalue") {
    Grid g = Grid::make(1, {0.0}, {1.0}, {200});
    GridFunction W = GridFunction::constant(g, 0.0);
    for (int i = 0; i < g.points(); ++i) {
        double x = g.coord(i)[0];
        W[i] = 30.0 * (x - 0.4) * (x - 0.4);
    }
    Spectrum s = spectrum(g, W, 1);
    GridFunction negW = W;
    for (double& v : negW.values) v = -v;
    double lam = principal_eigen(g, negW).lambda;
    CHECK(std::fabs(-s.energies[0] - lam) < 1e-8);
}

TEST_CASE("ldp report carries the alternate reading") {
    Spectrum box = analytic_box_spectrum({1.0}, 5);
    PartitionTable t = partition_recursion(box, 1.0, 64);
    LdpReport rep = ldp_check(t, box, 1.0, -kPi * kPi);
    REQUIRE(rep.beta_lambda_w.has_value());
    CHECK(*rep.beta_lambda_w == doctest::Approx(-kPi * kPi));
    CHECK_THROWS_AS(ldp_check(partition_recursion(box, 1.0, 16), box, 1.0),
                    precondition_error);
}

TEST_SUITE_END();
