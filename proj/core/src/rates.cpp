#include "symbridge/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace symbridge {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DensityOnGrid DensityOnGrid::validated(GridFunction f) {
    const double hv = f.grid.cell_volume();
    double total = 0.0;
    for (double v : f.values) {
        if (v < 0.0) throw config_error("density: values must be nonnegative");
        total += v;
    }
    total *= hv;
    if (std::fabs(total - 1.0) > 1e-10)
        throw config_error("density: integrates to " + std::to_string(total) +
                           ", expected 1 within 1e-10");
    return DensityOnGrid{std::move(f)};
}

DensityOnGrid DensityOnGrid::normalized(GridFunction f) {
    const double hv = f.grid.cell_volume();
    double total = 0.0;
    for (double v : f.values) {
        if (v < 0.0) throw config_error("density: values must be nonnegative");
        total += v;
    }
    if (!(total > 0.0)) throw config_error("density: total mass must be positive");
    for (double& v : f.values) v /= total * hv;
    return DensityOnGrid{std::move(f)};
}

double relative_entropy(const Eigen::MatrixXd& q, const Eigen::MatrixXd& ref) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double qi = q(i);
        if (qi == 0.0) continue;
        const double ri = ref(i);
        if (ri <= 0.0) return kInf;
        h += qi * std::log(qi / ri);
    }
    return h;
}

double relative_entropy(const PairMeasure& q, const PairMeasure& ref) {
    if (q.sigma_size() != ref.sigma_size())
        throw precondition_error("relative_entropy: measures live on different index sets");
    return relative_entropy(q.entries(), ref.entries());
}

DirichletEnergy donsker_varadhan(const DensityOnGrid& dens, double boundary_tol) {
    const Grid& g = dens.p.grid;
    const double hv = g.cell_volume();
    DirichletEnergy out;

    // mass on the outermost interior layer: proxy for sqrt(p) leaving H^1_0
    for (int i = 0; i < g.points(); ++i) {
        auto idx = g.unflat(i);
        bool outer = false;
        for (int a = 0; a < g.dim; ++a)
            outer |= idx[a] == 0 || idx[a] == g.n[a] - 1;
        if (outer) out.boundary_mass += dens.p[i] * hv;
    }
    if (out.boundary_mass > boundary_tol) {
        out.infinite = true;
        out.value = kInf;
        return out;
    }

    // Dirichlet form of the FD Laplacian: squared edge differences with the
    // zero extension, boundary edges included. (Centered differences drop the
    // two boundary half-cells, an O(h) deficiency of 2 pi^2 h on the ground
    // state, which already violates the 1e-2 benchmark at n = 400.)
    std::vector<double> phi(g.points());
    for (int i = 0; i < g.points(); ++i) phi[i] = std::sqrt(dens.p[i]);
    double energy = 0.0;
    for (int i = 0; i < g.points(); ++i) {
        auto idx = g.unflat(i);
        for (int a = 0; a < g.dim; ++a) {
            const double h = g.spacing(a);
            auto nb = idx;
            double up = 0.0;  // Dirichlet extension by zero
            if (idx[a] + 1 < g.n[a]) {
                nb[a] = idx[a] + 1;
                up = phi[g.flat(nb)];
            }
            double d = (up - phi[i]) / h;
            energy += d * d;
            if (idx[a] == 0) energy += (phi[i] / h) * (phi[i] / h);  // lower edge
        }
    }
    out.value = energy * hv;
    return out;
}

// ---------------------------------------------------------------------------
// CellFunctional

CellFunctional::CellFunctional(const Grid& grid, const Partition& part, double beta,
                               int steps, BridgeMode mode,
                               std::optional<Eigen::MatrixXd> log_g,
                               std::optional<Eigen::VectorXd> m_masses)
    : grid_(grid), part_(part), beta_(beta), steps_(steps), mode_(mode),
      log_g_(std::move(log_g)) {
    if (steps_ < 1) throw precondition_error("cell functional: steps must be >= 1");
    if (!(beta_ > 0.0)) throw precondition_error("cell functional: beta must be > 0");
    if (part_.dim != grid_.dim)
        throw config_error("cell functional: partition/grid dimension mismatch");
    ncells_ = part_.size();

    // Each grid point carries its Voronoi box (clipped to the full box, so the
    // boundary half-layers are absorbed by the first and last node per axis);
    // a point near a partition edge contributes to both adjacent cells with
    // the overlap volume. The weights tile every cell exactly. A partition at
    // grid resolution identifies cells with nodes one to one instead.
    cell_of_.resize(grid_.points());
    weight_ = Eigen::MatrixXd::Zero(ncells_, grid_.points());
    if (ncells_ == grid_.points()) {
        std::vector<char> used(ncells_, 0);
        for (int i = 0; i < grid_.points(); ++i) {
            int c = part_.locate(grid_.coord(i));
            if (c < 0 || used[c])
                throw config_error(
                    "cell functional: point-resolution partition must match the grid");
            used[c] = 1;
            cell_of_[i] = c;
            weight_(c, i) = grid_.cell_volume();
        }
    } else {
        for (int i = 0; i < grid_.points(); ++i) {
            Point x = grid_.coord(i);
            int c = part_.locate(x);
            if (c < 0)
                throw config_error("cell functional: grid point outside the partition");
            cell_of_[i] = c;
            auto idx = grid_.unflat(i);
            std::array<double, kMaxDim> vlo{}, vhi{};
            for (int a = 0; a < grid_.dim; ++a) {
                const double h = grid_.spacing(a);
                vlo[a] = idx[a] == 0 ? grid_.lo[a] : x[a] - 0.5 * h;
                vhi[a] = idx[a] == grid_.n[a] - 1 ? grid_.hi[a] : x[a] + 0.5 * h;
            }
            for (int r = 0; r < ncells_; ++r) {
                Point clo, chi;
                part_.cell_bounds(r, clo, chi);
                double overlap = 1.0;
                for (int a = 0; a < grid_.dim && overlap > 0.0; ++a)
                    overlap *=
                        std::max(0.0, std::min(vhi[a], chi[a]) - std::max(vlo[a], clo[a]));
                if (overlap > 0.0) weight_(r, i) = overlap;
            }
        }
    }
    vol_ = weight_.rowwise().sum();
    for (int r = 0; r < ncells_; ++r)
        if (!(vol_(r) > 0.0))
            throw config_error("cell functional: a partition cell contains no grid point");
    if (m_masses) {
        if (m_masses->size() != ncells_)
            throw config_error("cell functional: m_masses size mismatch");
        if ((m_masses->array() <= 0.0).any())
            throw config_error("cell functional: m_masses must be positive");
        m_ = *m_masses;
    } else {
        // canonical mode pairs with the Lebesgue reference by default
        m_ = vol_;
    }
    if (log_g_ && (log_g_->rows() != ncells_ || log_g_->cols() != ncells_))
        throw config_error("cell functional: log_g must be ncells x ncells");

    if (mode_ == BridgeMode::normalized) {
        State st0 = prepare(GridFunction::constant(grid_, 0.0));
        logK0_ = st0.logK;
    }
}

CellFunctional::State CellFunctional::prepare(const GridFunction& f) const {
    if (!(f.grid == grid_)) throw config_error("cell functional: f lives on another grid");
    State st;
    st.T = build_transfer(grid_, f, beta_ / steps_).kernel;

    // x-average with m|U_r weights; y-integration in units of the node volume
    // h^d so that the chain stays a plain power of the transfer matrix
    Eigen::MatrixXd U = weight_.array().colwise() / vol_.array();
    Eigen::MatrixXd V = weight_ / grid_.cell_volume();

    st.fwd.resize(steps_ + 1);
    st.bwd.resize(steps_ + 1);
    st.fwd_log.assign(steps_ + 1, 0.0);
    st.bwd_log.assign(steps_ + 1, 0.0);
    st.fwd[0] = U;
    st.bwd[0] = V;
    for (int j = 1; j <= steps_; ++j) {
        st.fwd[j] = st.fwd[j - 1] * st.T;
        double mf = st.fwd[j].maxCoeff();
        st.fwd[j] /= mf;
        st.fwd_log[j] = st.fwd_log[j - 1] + std::log(mf);
        st.bwd[j] = st.bwd[j - 1] * st.T;
        double mb = st.bwd[j].maxCoeff();
        st.bwd[j] /= mb;
        st.bwd_log[j] = st.bwd_log[j - 1] + std::log(mb);
    }
    st.smass = st.fwd[steps_] * V.transpose();
    st.smass_log = st.fwd_log[steps_];

    st.logK.resize(ncells_, ncells_);
    for (int r = 0; r < ncells_; ++r)
        for (int s = 0; s < ncells_; ++s)
            st.logK(r, s) = std::log(st.smass(r, s)) + st.smass_log;
    if (mode_ == BridgeMode::canonical) {
        for (int r = 0; r < ncells_; ++r)
            for (int s = 0; s < ncells_; ++s) st.logK(r, s) -= std::log(vol_(s));
    } else if (logK0_.size() > 0) {
        st.logK -= logK0_;
    }
    return st;
}

double CellFunctional::objective(const PairMeasure& q, const State& st,
                                 const GridFunction& f, const DensityOnGrid& p) const {
    if (q.sigma_size() != ncells_)
        throw config_error("cell functional: q index set does not match the partition");
    Eigen::VectorXd qbar = q.marginal_first();
    Eigen::MatrixXd ref = qbar * m_.transpose();
    double h = relative_entropy(q.entries(), ref);
    const double hv = grid_.cell_volume();
    double fp = 0.0;
    for (int i = 0; i < grid_.points(); ++i) fp += f[i] * p.p[i];
    fp *= hv;
    double val = h + beta_ * fp - (q.entries().array() * st.logK.array()).sum();
    if (log_g_) val -= (q.entries().array() * log_g_->array()).sum();
    return val;
}

Eigen::VectorXd CellFunctional::f_gradient(const PairMeasure& q, const State& st,
                                           const DensityOnGrid& p) const {
    const int np = grid_.points();
    Eigen::MatrixXd W = q.entries().cwiseQuotient(st.smass);
    const double tau = beta_ / steps_;
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(np);
    for (int j = 0; j <= steps_; ++j) {
        const double w = (j == 0 || j == steps_) ? 0.5 : 1.0;
        const double scale =
            std::exp(st.fwd_log[j] + st.bwd_log[steps_ - j] - st.smass_log);
        // sum_{r,s} W(r,s) fwd_j(r,z) bwd_{steps-j}(s,z)
        Eigen::MatrixXd M = W * st.bwd[steps_ - j];           // ncell x np
        rho.noalias() += (tau * w * scale) *
                         (st.fwd[j].cwiseProduct(M)).colwise().sum().transpose();
    }
    // coordinate gradient beta p(z) h^d - rho(z), returned in density scale;
    // rho sums to beta, so the gauge sum vanishes identically
    const double hv = grid_.cell_volume();
    Eigen::VectorXd g(np);
    for (int i = 0; i < np; ++i) g(i) = beta_ * p.p[i] - rho(i) / hv;
    return g;
}

CellFunctional::QSolve CellFunctional::minimize_q(const State& st) const {
    Eigen::MatrixXd c = st.logK;
    if (log_g_) c += *log_g_;
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + c.cwiseAbs().maxCoeff()))
        throw numerical_error("minimize_q: kernel cost must be symmetric");
    const double cmax = c.maxCoeff();
    Eigen::VectorXd sqm = m_.array().sqrt();
    Eigen::MatrixXd B(ncells_, ncells_);
    for (int r = 0; r < ncells_; ++r)
        for (int s = 0; s < ncells_; ++s)
            B(r, s) = std::exp(c(r, s) - cmax) * sqm(r) * sqm(s);
    B = 0.5 * (B + B.transpose().eval());
    EigenOptions eopts;
    eopts.tol = 1e-13;  // the saddle line search compares values near 1e-10
    MatrixEigenPair mp = principal_eigen_sym(B, eopts);
    Eigen::MatrixXd qe(ncells_, ncells_);
    for (int r = 0; r < ncells_; ++r)
        for (int s = 0; s < ncells_; ++s)
            qe(r, s) = mp.psi(r) * mp.psi(s) * B(r, s) / mp.mu;
    qe = qe.cwiseMax(0.0);
    qe /= qe.sum();
    return QSolve{PairMeasure(qe), -(std::log(mp.mu) + cmax)};
}

Eigen::VectorXd CellFunctional::aggregate_density(const DensityOnGrid& p) const {
    Eigen::VectorXd pv(grid_.points());
    for (int i = 0; i < grid_.points(); ++i) pv(i) = p.p[i];
    return weight_ * pv;
}

double objective_J(const PairMeasure& q, const GridFunction& f, const DensityOnGrid& p,
                   double beta, const Partition& part, BridgeMode mode,
                   std::optional<Eigen::MatrixXd> log_g,
                   std::optional<Eigen::VectorXd> m_masses, int steps) {
    CellFunctional fun(p.p.grid, part, beta, steps, mode, std::move(log_g),
                       std::move(m_masses));
    auto st = fun.prepare(f);
    return fun.objective(q, st, f, p);
}

// ---------------------------------------------------------------------------
// solve_J_q: sup over f of the Legendre part at fixed q

namespace {
double legendre_part(const PairMeasure& q, const CellFunctional::State& st,
                     const GridFunction& f, const DensityOnGrid& p, double beta) {
    const double hv = p.p.grid.cell_volume();
    double fp = 0.0;
    for (int i = 0; i < p.p.grid.points(); ++i) fp += f[i] * p.p[i];
    return beta * fp * hv - (q.entries().array() * st.logK.array()).sum();
}
}  // namespace

JqResult solve_J_q(const PairMeasure& q, const DensityOnGrid& p, double beta,
                   const Partition& part, BridgeMode mode, const SaddleOptions& opts) {
    CellFunctional fun(p.p.grid, part, beta, opts.steps, mode);
    GridFunction f = GridFunction::constant(p.p.grid, 0.0);
    auto st = fun.prepare(f);
    double val = legendre_part(q, st, f, p, beta);
    std::vector<double> track{val};
    double gnorm = 0.0;

    for (int it = 1; it <= opts.max_f_iter; ++it) {
        Eigen::VectorXd g = fun.f_gradient(q, st, p);
        gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm < opts.f_tol)
            return JqResult{val, f, it - 1, std::move(track), gnorm};
        double step = 1.0;
        bool improved = false;
        while (step > 1e-14) {
            GridFunction f2 = f;
            for (int i = 0; i < p.p.grid.points(); ++i) f2[i] += step * g(i);
            auto st2 = fun.prepare(f2);
            double v2 = legendre_part(q, st2, f2, p, beta);
            if (v2 > val) {
                f = std::move(f2);
                st = std::move(st2);
                val = v2;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        track.push_back(val);
        if (!improved) {
            // ascent direction exhausted at floating-point resolution
            if (gnorm < 1e3 * opts.f_tol)
                return JqResult{val, f, it, std::move(track), gnorm};
            throw solver_error("solve_J_q: line search stalled with gradient norm " +
                                   std::to_string(gnorm),
                               track);
        }
    }
    throw solver_error("solve_J_q: no convergence within " +
                           std::to_string(opts.max_f_iter) + " iterations (grad " +
                           std::to_string(gnorm) + ")",
                       track);
}

// ---------------------------------------------------------------------------
// solve_J_sym: alternating exact q-minimization and envelope f-ascent

SaddleState solve_J_sym(const DensityOnGrid& p, double beta, const Partition& part,
                        BridgeMode mode, std::optional<Eigen::MatrixXd> log_g,
                        std::optional<Eigen::VectorXd> m_masses,
                        const SaddleOptions& opts) {
    CellFunctional fun(p.p.grid, part, beta, opts.steps, mode, std::move(log_g),
                       std::move(m_masses));
    const int np = p.p.grid.points();
    const double hv = p.p.grid.cell_volume();
    GridFunction f = GridFunction::constant(p.p.grid, 0.0);

    auto reduced = [&](const GridFunction& ff, CellFunctional::State& st_out,
                       CellFunctional::QSolve& qs_out) {
        st_out = fun.prepare(ff);
        qs_out = fun.minimize_q(st_out);
        double fp = 0.0;
        for (int i = 0; i < np; ++i) fp += ff[i] * p.p[i];
        return beta * fp * hv + qs_out.value;
    };

    CellFunctional::State st;
    CellFunctional::QSolve qs{PairMeasure(Eigen::MatrixXd::Constant(1, 1, 1.0)), 0.0};
    double val = reduced(f, st, qs);
    std::vector<double> track{val};
    double gnorm = 0.0;
    int decreasing_streak = 0;
    int stalled_rounds = 0;

    for (int outer = 1; outer <= opts.max_outer; ++outer) {
        Eigen::VectorXd g = fun.f_gradient(qs.q, st, p);
        gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm < opts.f_tol)
            return SaddleState{qs.q, f, std::move(track), val, outer - 1, gnorm};

        double step = 1.0;
        bool improved = false;
        GridFunction f2 = f;
        CellFunctional::State st2;
        CellFunctional::QSolve qs2 = qs;
        double v2 = val;
        while (step > 1e-14) {
            for (int i = 0; i < np; ++i) f2[i] = f[i] + step * g(i);
            v2 = reduced(f2, st2, qs2);
            if (v2 > val) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            // no admissible ascent step: the saddle is resolved to FP accuracy
            return SaddleState{qs.q, f, std::move(track), val, outer, gnorm};
        }
        double prev = val;
        f = f2;
        st = std::move(st2);
        qs = std::move(qs2);
        val = v2;
        track.push_back(val);
        // with exact inner minimization the value sequence must not decrease
        decreasing_streak = (val < prev - 1e-12 * (1.0 + std::fabs(prev)))
                                ? decreasing_streak + 1 : 0;
        if (decreasing_streak >= opts.oscillation_window)
            throw solver_error("solve_J_sym: objective oscillation detected", track);
        // value convergence: improvements stuck below the stall threshold
        stalled_rounds = std::fabs(val - prev) < opts.value_stall * (1.0 + std::fabs(val))
                             ? stalled_rounds + 1 : 0;
        if (stalled_rounds >= 10)
            return SaddleState{qs.q, f, std::move(track), val, outer, gnorm};
    }
    throw solver_error("solve_J_sym: no convergence within " +
                           std::to_string(opts.max_outer) + " outer iterations (grad " +
                           std::to_string(gnorm) + ")",
                       track);
}

// ---------------------------------------------------------------------------
// jident_construct

JidentConstruction jident_construct(const DensityOnGrid& p, double beta, int steps) {
    const Grid& g = p.p.grid;
    const int np = g.points();
    const double hv = g.cell_volume();

    std::vector<double> phi(np);
    double pmax = *std::max_element(p.p.values.begin(), p.p.values.end());
    std::vector<char> hull(np, 0);
    for (int i = 0; i < np; ++i) {
        phi[i] = std::sqrt(p.p[i]);
        hull[i] = p.p[i] > 1e-12 * pmax;
    }

    // f* = -(Delta phi)/phi on the support hull, central second differences
    // with Dirichlet extension
    GridFunction fstar = GridFunction::constant(g, 0.0);
    for (int i = 0; i < np; ++i) {
        if (!hull[i]) continue;
        auto idx = g.unflat(i);
        double lap = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double h2 = g.spacing(a) * g.spacing(a);
            auto nb = idx;
            double up = 0.0, dn = 0.0;
            if (idx[a] + 1 < g.n[a]) {
                nb[a] = idx[a] + 1;
                up = phi[g.flat(nb)];
            }
            if (idx[a] - 1 >= 0) {
                nb[a] = idx[a] - 1;
                dn = phi[g.flat(nb)];
            }
            lap += (up - 2.0 * phi[i] + dn) / h2;
        }
        fstar[i] = -lap / phi[i];
    }
    // extend off-hull points by the nearest hull value
    for (int i = 0; i < np; ++i) {
        if (hull[i]) continue;
        auto xi = g.coord(i);
        double best = kInf;
        int bj = -1;
        for (int j = 0; j < np; ++j) {
            if (!hull[j]) continue;
            auto xj = g.coord(j);
            double d2 = 0.0;
            for (int a = 0; a < g.dim; ++a) d2 += (xi[a] - xj[a]) * (xi[a] - xj[a]);
            if (d2 < best) {
                best = d2;
                bj = j;
            }
        }
        if (bj < 0) throw precondition_error("jident_construct: empty support hull");
        fstar[i] = fstar[bj];
    }

    ScaledMatrix k = fk_bridge_matrix(g, fstar, beta, steps);
    Eigen::MatrixXd qe(np, np);
    for (int x = 0; x < np; ++x)
        for (int y = 0; y < np; ++y) qe(x, y) = phi[x] * phi[y] * k.mat(x, y);
    const double h2d = hv * hv;
    double mass = qe.sum() * std::exp(k.log_scale) * h2d;

    qe /= qe.sum();
    Eigen::VectorXd qbar = qe.rowwise().sum();
    double tv = 0.0;
    for (int i = 0; i < np; ++i) tv += std::fabs(qbar(i) - p.p[i] * hv);
    double fp = 0.0;
    for (int i = 0; i < np; ++i) fp += fstar[i] * p.p[i];
    double lambda = principal_eigen(g, fstar).lambda;
    return JidentConstruction{std::move(fstar), PairMeasure(qe), beta * fp * hv,
                              lambda, mass, 0.5 * tv};
}

// ---------------------------------------------------------------------------
// solve_pair_entropy and permanent_average (atoms)

namespace {
double pair_entropy_objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& m,
                              const Eigen::MatrixXd& logg) {
    Eigen::VectorXd qbar = q.rowwise().sum();
    double v = 0.0;
    for (int r = 0; r < q.rows(); ++r)
        for (int s = 0; s < q.cols(); ++s) {
            const double qi = q(r, s);
            if (qi == 0.0) continue;
            v += qi * (std::log(qi / (qbar(r) * m(s))) - logg(r, s));
        }
    return v;
}

// alternate row/column scaling to the averaged marginal
void sinkhorn_balance(Eigen::MatrixXd& q, double tol = 1e-10, int cap = 10000) {
    q /= q.sum();
    for (int sweep = 0; sweep < cap; ++sweep) {
        Eigen::VectorXd r = q.rowwise().sum();
        Eigen::VectorXd c = q.colwise().sum().transpose();
        if ((r - c).cwiseAbs().maxCoeff() < tol) return;
        Eigen::VectorXd t = 0.5 * (r + c);
        for (int i = 0; i < q.rows(); ++i)
            if (r(i) > 0.0) q.row(i) *= t(i) / r(i);
        c = q.colwise().sum().transpose();
        for (int j = 0; j < q.cols(); ++j)
            if (c(j) > 0.0) q.col(j) *= t(j) / c(j);
        q /= q.sum();
    }
    throw numerical_error("sinkhorn_balance: no marginal convergence in 10000 sweeps");
}
}  // namespace

PairEntropyResult solve_pair_entropy(const Eigen::VectorXd& m_in, const Eigen::MatrixXd& g,
                                     double tol, int max_iter) {
    const int k = static_cast<int>(m_in.size());
    if (g.rows() != k || g.cols() != k)
        throw config_error("solve_pair_entropy: g must be k x k");
    if ((g.array() <= 0.0).any())
        throw precondition_error("solve_pair_entropy: g must be positive entrywise");
    if ((m_in.array() <= 0.0).any())
        throw precondition_error("solve_pair_entropy: atom weights must be positive");
    Eigen::VectorXd m = m_in / m_in.sum();
    Eigen::MatrixXd logg = g.array().log();

    Eigen::MatrixXd q = m * m.transpose();
    double val = pair_entropy_objective(q, m, logg);
    int it = 0;
    for (it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd qbar = q.rowwise().sum();
        // multiplicative mirror step toward q ~ qbar(r) m(s) g(r,s)
        Eigen::MatrixXd grad(k, k);
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s)
                grad(r, s) = std::log(std::max(q(r, s), 1e-300) / (qbar(r) * m(s))) -
                             logg(r, s);
        double step = 1.0;
        bool improved = false;
        while (step > 1e-16) {
            Eigen::MatrixXd qn = q.array() * (-step * grad.array()).exp();
            sinkhorn_balance(qn);
            double vn = pair_entropy_objective(qn, m, logg);
            if (vn < val - tol) {
                q = std::move(qn);
                val = vn;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
        if (it == max_iter)
            throw solver_error("solve_pair_entropy: iteration cap reached", {val});
    }
    return PairEntropyResult{val, PairMeasure(q), it};
}

namespace {
// Ryser permanent, rows normalized by the caller; exact for n <= 10.
double ryser_permanent(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    double total = 0.0;
    std::vector<double> rowsum(n);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::fill(rowsum.begin(), rowsum.end(), 0.0);
        for (int j = 0; j < n; ++j)
            if (mask >> j & 1u)
                for (int i = 0; i < n; ++i) rowsum[i] += A(i, j);
        double pr = 1.0;
        for (int i = 0; i < n; ++i) pr *= rowsum[i];
        total += (__builtin_popcount(mask) % 2 ? -1.0 : 1.0) * pr;
    }
    return (n % 2 ? -1.0 : 1.0) * total;
}
}  // namespace

double permanent_average(const Eigen::VectorXd& m, const Eigen::MatrixXd& g, int n) {
    const int A = static_cast<int>(m.size());
    if (n > 10 || A > 3)
        throw precondition_error(
            "permanent_average: enumeration guard n <= 10, atoms <= 3 exceeded");
    if (g.rows() != A || g.cols() != A)
        throw config_error("permanent_average: g must be atoms x atoms");
    const double gmax = g.maxCoeff();
    Eigen::MatrixXd gn = g / gmax;

    // multisets of atom labels as count vectors
    std::vector<int> counts(A, 0);
    counts[0] = n;
    double best = -kInf;
    std::vector<double> terms;
    auto lfact = [](int x) { return std::lgamma(x + 1.0); };
    while (true) {
        // term = multinomial * prod m^c * perm(G)/n!  (G up to gmax^n)
        std::vector<int> labels;
        for (int a = 0; a < A; ++a) labels.insert(labels.end(), counts[a], a);
        Eigen::MatrixXd G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) G(i, j) = gn(labels[i], labels[j]);
        double perm = ryser_permanent(G);
        double lt = lfact(n);
        for (int a = 0; a < A; ++a)
            lt += counts[a] * std::log(m(a)) - lfact(counts[a]);
        lt += std::log(perm) + n * std::log(gmax) - lfact(n);
        terms.push_back(lt);
        best = std::max(best, lt);
        // next count vector with fixed total
        int a = 0;
        while (a < A - 1 && counts[a] == 0) ++a;
        if (a == A - 1) break;
        int head = counts[a];
        counts[a] = 0;
        counts[0] = head - 1;
        ++counts[a + 1];
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - best);
    return std::exp(best) * acc;
}

}  // namespace symbridge
