#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "symbridge/kernels.hpp"
#include "symbridge/rng.hpp"

using namespace symbridge;

namespace {
constexpr double kPi = 3.14159265358979323846;

Grid unit_grid(int n) { return Grid::make(1, {0.0}, {1.0}, {n}); }

GridFunction sine_potential(const Grid& g, double a1, double a2) {
    GridFunction f = GridFunction::constant(g, 0.0);
    for (int i = 0; i < g.points(); ++i) {
        double x = g.coord(i)[0];
        f[i] = a1 * std::sin(kPi * x) + a2 * std::cos(3.0 * kPi * x);
    }
    return f;
}
}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("gaussian kernel closed form and symmetry") {
    Point x{0.3, 0.0, 0.0};
    CHECK(gaussian_kernel(x, x, 1.0, 1) == doctest::Approx(0.28209479177387814).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_kernel(x, x, 0.0, 1), precondition_error);
    CHECK_THROWS_AS(gaussian_kernel(x, x, -1.0, 1), precondition_error);

    CounterRng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        Point a{rng.uniform(), rng.uniform(), 0.0};
        Point b{rng.uniform(), rng.uniform(), 0.0};
        double beta = 0.1 + rng.uniform();
        CHECK(gaussian_kernel(a, b, beta, 2) == doctest::Approx(gaussian_kernel(b, a, beta, 2)));
        // d = 2 factorizes into per-axis d = 1 kernels
        Point a0{a[0], 0.0, 0.0}, b0{b[0], 0.0, 0.0};
        Point a1{a[1], 0.0, 0.0}, b1{b[1], 0.0, 0.0};
        double prod = gaussian_kernel(a0, b0, beta, 1) * gaussian_kernel(a1, b1, beta, 1);
        CHECK(gaussian_kernel(a, b, beta, 2) == doctest::Approx(prod).epsilon(1e-12));
    }
}

TEST_CASE("transfer operator: Dirichlet leakage and constant shift") {
    Grid g = unit_grid(80);
    GridFunction zero = GridFunction::constant(g, 0.0);
    TransferOperator T = build_transfer(g, zero, 0.02);
    Eigen::VectorXd rows = T.kernel.rowwise().sum();
    CHECK(rows.maxCoeff() <= 1.0 + 1e-12);
    CHECK(rows(0) < rows(g.points() / 2));  // boundary loses mass
    CHECK(rows(0) < 1.0 - 1e-3);
    CHECK((T.kernel - T.kernel.transpose()).cwiseAbs().maxCoeff() == 0.0);

    GridFunction c = GridFunction::constant(g, 1.7);
    TransferOperator Tc = build_transfer(g, c, 0.02);
    double fac = std::exp(0.02 * 1.7);
    CHECK((Tc.kernel - fac * T.kernel).cwiseAbs().maxCoeff() <
          1e-14 * fac * T.kernel.maxCoeff());
}

TEST_CASE("transfer operator top eigenvalue matches e^{tau lambda}") {
    Grid g = unit_grid(200);
    GridFunction zero = GridFunction::constant(g, 0.0);
    TransferOperator T = build_transfer(g, zero, 0.01);
    MatrixEigenPair mp = principal_eigen_sym(T.kernel);
    double lam = principal_eigen(g, zero).lambda;
    CHECK(std::fabs(mp.mu - std::exp(0.01 * lam)) / std::exp(0.01 * lam) < 1e-3);
}

TEST_CASE("fk bridge matrix equals the Dirichlet eigenseries") {
    // n = 399 places 0.5 exactly on the grid
    Grid g = unit_grid(399);
    GridFunction zero = GridFunction::constant(g, 0.0);
    const double beta = 0.1;
    ScaledMatrix k = fk_bridge_matrix(g, zero, beta, 16);
    int i0 = g.nearest_interior(Point{0.5, 0.0, 0.0});
    REQUIRE(i0 >= 0);
    double x0 = g.coord(i0)[0];
    CHECK(x0 == doctest::Approx(0.5).epsilon(1e-14));
    double series = 0.0;
    for (int kk = 1; kk <= 2000; ++kk) {
        double s = std::sin(kPi * kk * x0);
        series += std::exp(-beta * kPi * kPi * kk * kk) * 2.0 * s * s;
    }
    CHECK(std::fabs(k.value(i0, i0) - series) < 1e-6);
}

TEST_CASE("fk bridge matrix becomes rank one at large beta") {
    Grid g = unit_grid(80);
    GridFunction zero = GridFunction::constant(g, 0.0);
    const double beta = 0.5;
    const int steps = 8;
    ScaledMatrix k = fk_bridge_matrix(g, zero, beta, steps);

    // dense spectral oracle of the one-step operator
    TransferOperator T = build_transfer(g, zero, beta / steps);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.kernel);
    const int np = g.points();
    double mu1 = es.eigenvalues()(np - 1);
    double mu2 = es.eigenvalues()(np - 2);
    Eigen::VectorXd v1 = es.eigenvectors().col(np - 1);
    if (v1.sum() < 0) v1 = -v1;
    double spectral_ratio = std::pow(mu2 / mu1, steps);

    const double hv = g.cell_volume();
    double worst = 0.0;
    for (int i = np / 4; i < 3 * np / 4; ++i)
        for (int j = np / 4; j < 3 * np / 4; ++j) {
            double rank1 = std::pow(mu1, steps) * v1(i) * v1(j) / hv;
            worst = std::max(worst, std::fabs(k.value(i, j) / rank1 - 1.0));
        }
    CHECK(worst < 20.0 * spectral_ratio + 1e-12);
    CHECK(worst < 1e-4);
}

TEST_CASE("time splitting error shrinks at least first order") {
    Grid g = unit_grid(150);
    GridFunction f = GridFunction::constant(g, 0.0);
    for (int i = 0; i < g.points(); ++i)
        f[i] = 30.0 * std::cos(3.0 * kPi * g.coord(i)[0]);
    const double beta = 0.1;
    int i0 = g.nearest_interior(Point{0.3, 0.0, 0.0});
    int j0 = g.nearest_interior(Point{0.6, 0.0, 0.0});
    double ref = fk_bridge_matrix(g, f, beta, 1024).value(i0, j0);
    double prev = 0.0;
    for (int steps : {8, 16, 32, 64}) {
        double err = std::fabs(fk_bridge_matrix(g, f, beta, steps).value(i0, j0) - ref);
        if (steps > 8) CHECK(prev / err > 1.8);
        prev = err;
    }
}

TEST_CASE("semigroup property at a common step size") {
    Grid g = unit_grid(60);
    GridFunction f = sine_potential(g, 2.0, -1.0);
    const double tau = 0.0125;
    ScaledMatrix a = fk_bridge_matrix(g, f, 8 * tau, 8);
    ScaledMatrix b = fk_bridge_matrix(g, f, 12 * tau, 12);
    ScaledMatrix c = fk_bridge_matrix(g, f, 20 * tau, 20);
    Eigen::MatrixXd composed = a.mat * b.mat * g.cell_volume();
    double comp_log = a.log_scale + b.log_scale;
    double worst = 0.0;
    for (int i = 0; i < g.points(); i += 7)
        for (int j = 0; j < g.points(); j += 7) {
            double lhs = std::log(composed(i, j)) + comp_log;
            worst = std::max(worst, std::fabs(lhs - c.log_value(i, j)));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("principal eigenvalue of the Dirichlet box") {
    Grid g = unit_grid(400);
    EigenPair ep = principal_eigen(g, GridFunction::constant(g, 0.0));
    CHECK(std::fabs(ep.lambda + kPi * kPi) < 1e-2);
    double minphi = *std::min_element(ep.phi.values.begin(), ep.phi.values.end());
    CHECK(minphi > 0.0);
    // L2 normalization with weight h
    double norm = 0.0;
    for (double v : ep.phi.values) norm += v * v;
    CHECK(norm * g.cell_volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalue shift invariance") {
    Grid g = unit_grid(120);
    CounterRng rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        GridFunction f = sine_potential(g, 4.0 * rng.uniform() - 2.0, 3.0 * rng.uniform());
        double c = 10.0 * (rng.uniform() - 0.5);
        GridFunction fc = f;
        for (double& v : fc.values) v += c;
        double l0 = principal_eigen(g, f).lambda;
        double l1 = principal_eigen(g, fc).lambda;
        CHECK(std::fabs(l1 - l0 - c) < 1e-9 * (1.0 + std::fabs(l0)));
    }
}

TEST_CASE("well potential against the dense eigensolver oracle") {
    Grid g = unit_grid(200);
    GridFunction f = GridFunction::constant(g, 0.0);
    for (int i = 0; i < g.points(); ++i) {
        double x = g.coord(i)[0];
        f[i] = std::fabs(x - 0.5) > 0.25 ? -50.0 : 0.0;
    }
    EigenPair ep = principal_eigen(g, f);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fd_operator(g, f));
    double dense = es.eigenvalues().maxCoeff();
    CHECK(std::fabs(ep.lambda - dense) < 1e-8);
    CHECK(ep.lambda < -kPi * kPi);
}

TEST_CASE("eigen solver failure is explicit") {
    Grid g = unit_grid(60);
    GridFunction f = sine_potential(g, 5.0, 2.0);
    EigenOptions opts;
    opts.tol = 0.0;  // unattainable
    opts.max_iter = 3;
    CHECK_THROWS_AS(principal_eigen(g, f, opts), numerical_error);
}

TEST_CASE("girsanov mass is one and fails off the interior") {
    Grid g = unit_grid(150);
    GridFunction zero = GridFunction::constant(g, 0.0);
    CHECK(std::fabs(girsanov_mass(g, zero, 0.5, Point{0.37, 0.0, 0.0}) - 1.0) < 1e-6);
    GridFunction well = sine_potential(g, -3.0, 1.0);
    CHECK(std::fabs(girsanov_mass(g, well, 1.0, Point{0.6, 0.0, 0.0}) - 1.0) < 1e-6);
    // negative control: biased lambda
    double m = girsanov_mass(g, zero, 1.0, Point{0.5, 0.0, 0.0}, 64, 0.1);
    CHECK(m == doctest::Approx(std::exp(-0.1)).epsilon(1e-6));
    CHECK_THROWS_AS(girsanov_mass(g, zero, 0.5, Point{0.0, 0.0, 0.0}), precondition_error);
    CHECK_THROWS_AS(girsanov_mass(g, zero, 0.5, Point{1.5, 0.0, 0.0}), precondition_error);
}

TEST_CASE("girsanov mass does not depend on the interior point") {
    Grid g = unit_grid(100);
    GridFunction f = sine_potential(g, 2.0, -0.5);
    double m1 = girsanov_mass(g, f, 0.8, Point{0.2, 0.0, 0.0});
    double m2 = girsanov_mass(g, f, 0.8, Point{0.8, 0.0, 0.0});
    CHECK(std::fabs(m1 - m2) < 1e-7);
}

TEST_SUITE_END();
