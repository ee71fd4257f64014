#include "symbridge/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace symbridge {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Per-axis Dirichlet heat kernel on [0,L] (generator Delta): image sum
//   sum_m g(a - b - 2mL) - g(a + b - 2mL),  g Gaussian with variance 2t.
double dirichlet_1d(double a, double b, double L, double t) {
    const double c = 1.0 / std::sqrt(4.0 * kPi * t);
    const double inv4t = 1.0 / (4.0 * t);
    // Images beyond |u| > 19.2 sqrt(t) are below 1e-40 of the peak.
    const int M = static_cast<int>(std::ceil((19.2 * std::sqrt(t) + 2.0 * L) / (2.0 * L)));
    double sum = 0.0;
    for (int m = -M; m <= M; ++m) {
        const double u = a - b - 2.0 * m * L;
        const double v = a + b - 2.0 * m * L;
        sum += std::exp(-u * u * inv4t) - std::exp(-v * v * inv4t);
    }
    return c * sum;
}
}  // namespace

double gaussian_kernel(const Point& x, const Point& y, double beta, int dim) {
    if (!(beta > 0.0)) throw precondition_error("gaussian_kernel: beta must be > 0");
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) d2 += (x[a] - y[a]) * (x[a] - y[a]);
    return std::pow(4.0 * kPi * beta, -0.5 * dim) * std::exp(-d2 / (4.0 * beta));
}

double dirichlet_heat_kernel(const Grid& g, const Point& x, const Point& y, double t) {
    if (!(t > 0.0)) throw precondition_error("dirichlet_heat_kernel: t must be > 0");
    double k = 1.0;
    for (int a = 0; a < g.dim; ++a)
        k *= dirichlet_1d(x[a] - g.lo[a], y[a] - g.lo[a], g.hi[a] - g.lo[a], t);
    return k;
}

TransferOperator build_transfer(const Grid& grid, const GridFunction& f, double tau) {
    if (!(tau > 0.0)) throw precondition_error("build_transfer: tau must be > 0");
    if (!(f.grid == grid)) throw config_error("build_transfer: f lives on another grid");
    for (double v : f.values)
        if (!std::isfinite(v))
            throw precondition_error("build_transfer: f must be finite on interior points");

    const int np = grid.points();
    const double hv = grid.cell_volume();
    Eigen::MatrixXd K(np, np);
    std::vector<Point> pts(np);
    for (int i = 0; i < np; ++i) pts[i] = grid.coord(i);
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j <= i; ++j) {
            double v = dirichlet_heat_kernel(grid, pts[i], pts[j], tau) *
                       std::exp(0.5 * tau * (f[i] + f[j])) * hv;
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return TransferOperator{grid, tau, std::move(K)};
}

void ScaledMatrix::rescale() {
    double m = mat.cwiseAbs().maxCoeff();
    if (m > 0.0 && std::isfinite(m)) {
        mat /= m;
        log_scale += std::log(m);
    }
}

ScaledMatrix scaled_power(const Eigen::MatrixXd& base, int exponent) {
    if (exponent < 1) throw precondition_error("scaled_power: exponent must be >= 1");
    ScaledMatrix sq{base, 0.0};
    sq.rescale();
    ScaledMatrix out;
    bool have = false;
    int e = exponent;
    while (e > 0) {
        if (e & 1) {
            if (!have) {
                out = sq;
                have = true;
            } else {
                out.mat = (out.mat * sq.mat).eval();
                out.log_scale += sq.log_scale;
                out.rescale();
            }
        }
        e >>= 1;
        if (e) {
            sq.mat = (sq.mat * sq.mat).eval();
            sq.log_scale *= 2.0;
            sq.rescale();
        }
    }
    return out;
}

ScaledMatrix fk_bridge_matrix(const Grid& grid, const GridFunction& f, double beta,
                              int steps) {
    if (steps < 1) throw precondition_error("fk_bridge_matrix: steps must be >= 1");
    if (!(beta > 0.0)) throw precondition_error("fk_bridge_matrix: beta must be > 0");
    TransferOperator T = build_transfer(grid, f, beta / steps);
    ScaledMatrix m = scaled_power(T.kernel, steps);
    m.log_scale -= std::log(grid.cell_volume());
    return m;
}

Eigen::MatrixXd fd_operator(const Grid& grid, const GridFunction& f) {
    const int np = grid.points();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(np, np);
    for (int i = 0; i < np; ++i) {
        auto idx = grid.unflat(i);
        double diag = f[i];
        for (int a = 0; a < grid.dim; ++a) {
            const double ih2 = 1.0 / (grid.spacing(a) * grid.spacing(a));
            diag -= 2.0 * ih2;
            auto nb = idx;
            if (idx[a] + 1 < grid.n[a]) {
                nb[a] = idx[a] + 1;
                A(i, grid.flat(nb)) = ih2;
            }
            if (idx[a] - 1 >= 0) {
                nb[a] = idx[a] - 1;
                A(i, grid.flat(nb)) = ih2;
            }
        }
        A(i, i) = diag;
    }
    return A;
}

namespace {
// Shifted inverse power iteration for the largest eigenvalue of a symmetric
// matrix whose spectrum lies below `shift`.
MatrixEigenPair inverse_power(const Eigen::MatrixXd& A, double shift,
                              const EigenOptions& opts, const char* what) {
    const int np = static_cast<int>(A.rows());
    Eigen::MatrixXd M = -A;
    M.diagonal().array() += shift;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw numerical_error(std::string(what) + ": shifted operator not positive definite");

    Eigen::VectorXd v = Eigen::VectorXd::Ones(np).normalized();
    double lambda = 0.0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        v = llt.solve(v);
        v.normalize();
        lambda = v.dot(A * v);
        double res = (A * v - lambda * v).cwiseAbs().maxCoeff() / (1.0 + std::fabs(lambda));
        if (res < opts.tol) {
            if (v.sum() < 0.0) v = -v;
            return MatrixEigenPair{lambda, v, it};
        }
    }
    throw numerical_error(std::string(what) + ": inverse iteration did not converge in " +
                          std::to_string(opts.max_iter) + " iterations");
}
}  // namespace

MatrixEigenPair principal_eigen_sym(const Eigen::MatrixXd& S, const EigenOptions& opts) {
    double bound = S.cwiseAbs().rowwise().sum().maxCoeff();  // Gershgorin
    return inverse_power(S, bound + 1.0, opts, "principal_eigen_sym");
}

EigenPair principal_eigen(const Grid& grid, const GridFunction& f,
                          const EigenOptions& opts) {
    for (double v : f.values)
        if (!std::isfinite(v))
            throw precondition_error("principal_eigen: f must be finite");
    Eigen::MatrixXd A = fd_operator(grid, f);
    double fmax = *std::max_element(f.values.begin(), f.values.end());
    MatrixEigenPair mp = inverse_power(A, fmax + 1.0, opts, "principal_eigen");

    // L2 normalization with weight h^d; Perron vector must be positive.
    const double hv = grid.cell_volume();
    Eigen::VectorXd phi = mp.psi / (mp.psi.norm() * std::sqrt(hv));
    if (phi.minCoeff() <= 0.0)
        throw numerical_error("principal_eigen: principal vector not strictly positive");
    double res = (A * mp.psi - mp.mu * mp.psi).cwiseAbs().maxCoeff();
    GridFunction phif(grid, std::vector<double>(phi.data(), phi.data() + phi.size()));
    return EigenPair{mp.mu, std::move(phif), mp.iterations, res};
}

double girsanov_mass(const Grid& grid, const GridFunction& f, double beta, const Point& x,
                     int steps, double lambda_bias, const EigenOptions& opts) {
    if (!(beta > 0.0)) throw precondition_error("girsanov_mass: beta must be > 0");
    int ix = grid.nearest_interior(x);
    if (ix < 0)
        throw precondition_error("girsanov_mass: x must be an interior point of the box");

    const double tau = beta / steps;
    TransferOperator T = build_transfer(grid, f, tau);
    MatrixEigenPair mp = principal_eigen_sym(T.kernel, opts);
    const double lambda = std::log(mp.mu) / tau + lambda_bias;

    // sum_y T^steps(x,y) psi(y) * e^{-beta lambda} / psi(x); the power is
    // applied as `steps` mat-vec products in log-rescaled form.
    Eigen::VectorXd v = mp.psi;
    double logw = 0.0;
    for (int s = 0; s < steps; ++s) {
        v = T.kernel * v;
        double m = v.cwiseAbs().maxCoeff();
        v /= m;
        logw += std::log(m);
    }
    return v(ix) / mp.psi(ix) * std::exp(logw - beta * lambda);
}

}  // namespace symbridge
