#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "symbridge/combinatorics.hpp"
#include "symbridge/ensemble.hpp"
#include "symbridge/grid.hpp"
#include "symbridge/kernels.hpp"

namespace symbridge {

// Probability density on the grid: p >= 0, sum p h^d = 1 (1e-10).
struct DensityOnGrid {
    GridFunction p;

    static DensityOnGrid validated(GridFunction f);
    static DensityOnGrid normalized(GridFunction f);
};

// sum q log(q/ref), 0 log 0 = 0, +inf when q charges a ref-null cell.
double relative_entropy(const PairMeasure& q, const PairMeasure& ref);
// Same against an arbitrary nonnegative reference matrix (q-bar x m etc.).
double relative_entropy(const Eigen::MatrixXd& q, const Eigen::MatrixXd& ref);

struct DirichletEnergy {
    double value = 0.0;       // +inf when the H^1_0 proxy fails
    bool infinite = false;
    double boundary_mass = 0.0;
};

// ||grad sqrt(p)||_2^2 by central differences with Dirichlet extension.
// Mass above boundary_tol on the outermost interior layer is the proxy for
// sqrt(p) not lying in H^1_0.
DirichletEnergy donsker_varadhan(const DensityOnGrid& p, double boundary_tol = 1e-4);

// The two bridge conventions of the rate functions. No default: the
// normalized bridge (probability measures) and the canonical one (Lebesgue
// initial measure, unnormalized kernel) differ exactly by the <q, log g>
// tilt and must be selected explicitly.
enum class BridgeMode { normalized, canonical };

struct SaddleOptions {
    int steps = 32;            // time discretization of the FK kernel
    double f_tol = 1e-6;       // stop when ||beta(p - rho)||_inf < f_tol (density scale)
    int max_f_iter = 5000;
    int max_outer = 5000;
    double value_stall = 1e-8;  // relative objective stall stop (solve_J_sym)
    int oscillation_window = 50;
};

// Cell-level Feynman-Kac functional shared by objective_J / solve_J_q /
// solve_J_sym. Cells come from a Partition aligned with the grid (every cell
// must contain at least one grid point); x-weights inside a cell are uniform.
class CellFunctional {
  public:
    CellFunctional(const Grid& grid, const Partition& part, double beta, int steps,
                   BridgeMode mode, std::optional<Eigen::MatrixXd> log_g = std::nullopt,
                   std::optional<Eigen::VectorXd> m_masses = std::nullopt);

    // Per-f state: transfer matrix, forward/backward cell sweeps, log K term.
    struct State {
        Eigen::MatrixXd logK;      // mode-dependent log kernel term, ncell x ncell
        double f_dot_p = 0.0;      // filled by objective()
        // internal sweeps for gradients
        std::vector<Eigen::MatrixXd> fwd, bwd;  // j = 0..steps, ncell x npts
        std::vector<double> fwd_log, bwd_log;
        Eigen::MatrixXd smass;     // scaled cell-pair mass, with smass_log
        double smass_log = 0.0;
        Eigen::MatrixXd T;
    };

    State prepare(const GridFunction& f) const;

    int ncells() const { return ncells_; }
    const Eigen::VectorXd& reference_masses() const { return m_; }
    const std::vector<int>& cell_of_point() const { return cell_of_; }

    // H(q | qbar x m) + beta <f,p> - sum q logK - <q, log g>
    double objective(const PairMeasure& q, const State& st, const GridFunction& f,
                     const DensityOnGrid& p) const;

    // density-scale gradient beta (p - rho_{q,f}) of the objective in f
    Eigen::VectorXd f_gradient(const PairMeasure& q, const State& st,
                               const DensityOnGrid& p) const;

    // exact minimizer of q -> H(q|qbar x m) - <q, logK + log g> over
    // equal-marginal pair measures (Perron reduction of the multiplicative
    // mirror fixed point); .value is the attained infimum.
    struct QSolve {
        PairMeasure q;
        double value = 0.0;
    };
    QSolve minimize_q(const State& st) const;

    Eigen::VectorXd aggregate_density(const DensityOnGrid& p) const;  // p mass per cell

  private:
    Grid grid_;
    Partition part_;
    double beta_;
    int steps_;
    BridgeMode mode_;
    int ncells_ = 0;
    std::vector<int> cell_of_;   // grid point -> cell (by location)
    Eigen::MatrixXd weight_;     // ncell x npts: Voronoi overlap volumes
    Eigen::VectorXd vol_;        // exact cell volumes
    Eigen::VectorXd m_;          // reference masses in H(q | qbar x m)
    std::optional<Eigen::MatrixXd> log_g_;
    Eigen::MatrixXd logK0_;      // f == 0 normalizer (normalized mode)
};

// Spec-level wrapper: evaluates the variational integrand at (q, f, p).
double objective_J(const PairMeasure& q, const GridFunction& f, const DensityOnGrid& p,
                   double beta, const Partition& part, BridgeMode mode,
                   std::optional<Eigen::MatrixXd> log_g = std::nullopt,
                   std::optional<Eigen::VectorXd> m_masses = std::nullopt,
                   int steps = 32);

struct JqResult {
    double value = 0.0;
    GridFunction f;
    int iterations = 0;
    std::vector<double> value_track;
    double grad_norm = 0.0;
};

// sup over f of the Legendre part at fixed q, by gradient ascent with
// backtracking from unit step. Throws solver_error at the iteration cap.
JqResult solve_J_q(const PairMeasure& q, const DensityOnGrid& p, double beta,
                   const Partition& part, BridgeMode mode,
                   const SaddleOptions& opts = {});

struct SaddleState {
    PairMeasure q;
    GridFunction f;
    std::vector<double> value_track;
    double value = 0.0;
    int outer_iterations = 0;
    double f_grad_norm = 0.0;
};

// inf over equal-marginal q of { H(q|qbar x m) + J^(q)(p) [- <q, log g>] }:
// alternates the exact multiplicative-mirror fixed point in q with
// envelope-gradient ascent in f.
SaddleState solve_J_sym(const DensityOnGrid& p, double beta, const Partition& part,
                        BridgeMode mode,
                        std::optional<Eigen::MatrixXd> log_g = std::nullopt,
                        std::optional<Eigen::VectorXd> m_masses = std::nullopt,
                        const SaddleOptions& opts = {});

struct JidentConstruction {
    GridFunction f_star;   // -(Delta phi)/phi on the support hull
    PairMeasure q_star;    // phi(x) phi(y) k^{f*}_beta(x,y) h^{2d}, normalized
    double value = 0.0;    // beta <f*, p>
    double lambda_fstar = 0.0;   // principal eigenvalue at f*, ~0
    double q_mass = 0.0;         // unnormalized q* total, ~1
    double qbar_tv = 0.0;        // TV(qbar*, p) on grid points
};

// Explicit optimizer of the canonical-mode functional for interior-supported
// densities: phi = sqrt(p), f* = -(Delta phi)/phi (central differences),
// outside the support hull (p <= 1e-12 max p) f* is extended by its hull
// boundary value.
JidentConstruction jident_construct(const DensityOnGrid& p, double beta, int steps = 32);

struct PairEntropyResult {
    double value = 0.0;
    PairMeasure q;
    int iterations = 0;
};

// min over equal-marginal q of H(q|qbar x m) - <q, log g> on atoms, by
// multiplicative mirror descent with Sinkhorn marginal projection. Stops
// when no step improves by more than tol.
PairEntropyResult solve_pair_entropy(const Eigen::VectorXd& m, const Eigen::MatrixXd& g,
                                     double tol = 1e-15, int max_iter = 200000);

// (1/N!) sum_sigma sum_assignments prod m prod g, evaluated exactly by the
// atom-count decomposition with Ryser permanents; guards n <= 10, atoms <= 3.
double permanent_average(const Eigen::VectorXd& m, const Eigen::MatrixXd& g, int n);

}  // namespace symbridge
