#pragma once

#include <Eigen/Dense>
#include <optional>

#include "symbridge/grid.hpp"

namespace symbridge {

// Gaussian transition density of the generator-Delta motion (variance 2t
// per coordinate): (4 pi beta)^{-d/2} exp(-|x-y|^2 / (4 beta)).
double gaussian_kernel(const Point& x, const Point& y, double beta, int dim);

// Dirichlet heat kernel of the box via per-axis image sums; exact up to
// image truncation below 1e-40 of the leading term.
double dirichlet_heat_kernel(const Grid& g, const Point& x, const Point& y, double t);

// One Strang step of the Feynman-Kac semigroup e^{tau (Delta + f)} on the
// box with Dirichlet condition:
//   kernel(x,y) = p^D_tau(x,y) * exp(tau (f(x)+f(y))/2) * h^d
// restricted to interior points; symmetric, entries >= 0, row sums <= 1 at
// f == 0 (mass hitting the boundary is lost).
struct TransferOperator {
    Grid grid;
    double tau = 0.0;
    Eigen::MatrixXd kernel;
};

TransferOperator build_transfer(const Grid& grid, const GridFunction& f, double tau);

// Dense matrix carried as mat * exp(log_scale); matrix powers rescale by the
// running max entry so that e^{beta lambda} decay never underflows.
struct ScaledMatrix {
    Eigen::MatrixXd mat;
    double log_scale = 0.0;

    double value(int i, int j) const { return mat(i, j) * std::exp(log_scale); }
    double log_value(int i, int j) const { return std::log(mat(i, j)) + log_scale; }
    void rescale();
};

ScaledMatrix scaled_power(const Eigen::MatrixXd& base, int exponent);

// Discrete density of the Dirichlet Feynman-Kac bridge kernel k^f_beta(x,y):
// (build_transfer(grid, f, beta/steps).kernel)^steps / h^d.
ScaledMatrix fk_bridge_matrix(const Grid& grid, const GridFunction& f, double beta,
                              int steps);

struct EigenOptions {
    double tol = 1e-10;   // residual ||Av - lambda v||_inf / (1+|lambda|)
    int max_iter = 10000;
};

struct EigenPair {
    double lambda = 0.0;
    GridFunction phi;  // positive, L2-normalized with weight h^d
    int iterations = 0;
    double residual = 0.0;
};

// Principal (largest) eigenvalue of the second-order finite-difference
// Delta + f with Dirichlet condition, by shifted inverse power iteration.
// Throws numerical_error when the iteration cap is hit.
EigenPair principal_eigen(const Grid& grid, const GridFunction& f,
                          const EigenOptions& opts = {});

// Same iteration for a generic symmetric nonnegative matrix (Perron pair).
struct MatrixEigenPair {
    double mu = 0.0;
    Eigen::VectorXd psi;  // positive, unit 2-norm
    int iterations = 0;
};
MatrixEigenPair principal_eigen_sym(const Eigen::MatrixXd& S,
                                    const EigenOptions& opts = {});

// Finite-difference matrix of Delta + f (dense, symmetric).
Eigen::MatrixXd fd_operator(const Grid& grid, const GridFunction& f);

// Girsanov-martingale normalization: sum_y k^f_beta(x,y) e^{-beta lambda}
// phi(y)/phi(x) h^d with (lambda, phi) the spectral data consistent with the
// transfer discretization. The martingale property forces the value 1;
// lambda_bias shifts lambda for negative controls (value e^{-beta*bias}).
double girsanov_mass(const Grid& grid, const GridFunction& f, double beta,
                     const Point& x, int steps = 64, double lambda_bias = 0.0,
                     const EigenOptions& opts = {});

}  // namespace symbridge
