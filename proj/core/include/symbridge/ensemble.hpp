#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "symbridge/combinatorics.hpp"
#include "symbridge/grid.hpp"
#include "symbridge/rng.hpp"

namespace symbridge {

// Time-discretized path on [0, beta]: steps+1 equispaced instants,
// positions stored row-major (instant, axis).
struct Path {
    double beta = 0.0;
    int dim = 1;
    std::vector<double> pts;

    int steps() const { return static_cast<int>(pts.size()) / dim - 1; }
    double time(int j) const { return beta * j / steps(); }
    std::span<const double> point(int j) const { return {pts.data() + j * dim, static_cast<size_t>(dim)}; }
    Point point_at(int j) const {
        Point x{};
        for (int a = 0; a < dim; ++a) x[a] = pts[j * dim + a];
        return x;
    }
};

struct EnsembleSample {
    int n = 0;
    int dim = 1;
    double beta = 0.0;
    std::vector<int> sigma;       // empty for mixture samples
    std::vector<double> starts;   // n * dim
    std::vector<Path> paths;
    std::uint64_t rng_key = 0;
    double log_weight = 0.0;

    Point start(int i) const {
        Point x{};
        for (int a = 0; a < dim; ++a) x[a] = starts[i * dim + a];
        return x;
    }
};

// Initial measure m: finite atoms with weights, or the uniform density on a
// box. These two forms cover every experiment in scope.
class InitialMeasure {
  public:
    static InitialMeasure atoms(std::vector<Point> pts, std::vector<double> weights, int dim);
    static InitialMeasure uniform_box(const std::vector<double>& lo,
                                      const std::vector<double>& hi);

    int dim() const { return dim_; }
    bool is_atoms() const { return is_atoms_; }
    double total_mass() const { return total_mass_; }
    const std::vector<Point>& atom_points() const { return atoms_; }
    const std::vector<double>& atom_weights() const { return weights_; }
    const std::array<double, kMaxDim>& box_lo() const { return lo_; }
    const std::array<double, kMaxDim>& box_hi() const { return hi_; }

    Point sample(CounterRng& rng) const;
    // m restricted to the axis-aligned cell [clo, chi); throws config_error
    // when the restriction has no mass.
    Point sample_in_cell(const Point& clo, const Point& chi, CounterRng& rng) const;

  private:
    bool is_atoms_ = false;
    int dim_ = 1;
    std::vector<Point> atoms_;
    std::vector<double> weights_;  // normalized cumulative inside sample()
    std::vector<double> cum_;
    std::array<double, kMaxDim> lo_{}, hi_{};
    double total_mass_ = 0.0;
};

// Finite decomposition of the box into axis-aligned cells, uniform per axis.
// Cells are half-open [lo, hi) except the last cell per axis, which is
// closed, so the cells partition the box exactly.
struct Partition {
    int dim = 1;
    std::array<double, kMaxDim> lo{}, hi{};
    std::array<int, kMaxDim> cells{};

    static Partition uniform(const std::vector<double>& lo, const std::vector<double>& hi,
                             const std::vector<int>& cells);

    int size() const {
        int p = 1;
        for (int a = 0; a < dim; ++a) p *= cells[a];
        return p;
    }
    double width(int axis) const { return (hi[axis] - lo[axis]) / cells[axis]; }
    double fineness() const;
    int locate(const Point& x) const;  // -1 when outside the box
    void cell_bounds(int r, Point& clo, Point& chi) const;
    std::vector<double> lebesgue_weights() const;  // m(r) = |U_r| / |Box|
    std::vector<double> cell_volumes() const;
};

// log g(x, y) for the weighted ensembles of Prop-style g-tilts.
using LogPairWeight = std::function<double(const Point&, const Point&)>;

// log p_beta(x,y): the canonical-ensemble weight (g = p_beta), whose
// reciprocal is the normalized-bridge tilt.
double log_gaussian_pair(const Point& x, const Point& y, int dim, double beta);

// Discretized bridge of the generator-Delta motion from x to y: Gaussian
// walk with per-step variance 2*tau per coordinate, affine endpoint
// correction; both endpoints are assigned exactly.
Path sample_bridge(const Point& x, const Point& y, int dim, double beta, int steps,
                   CounterRng& rng);

// Two-step mechanism of the symmetrised ensemble: sigma uniform on Sym_n
// (Fisher-Yates), starts i.i.d. from m, path i bridges starts[i] ->
// starts[sigma[i]]; log_weight accumulates log g over endpoint pairs.
EnsembleSample sample_sym(const InitialMeasure& m, int n, double beta, int steps,
                          const LogPairWeight* g, CounterRng& rng);

// Stratified cell-pair ensemble: exactly n*eta(r,s) paths from U_r to U_s,
// start from m|U_r, end from the beta-heat-kernel tilt of m-independent
// Lebesgue on U_s (per-axis truncated Gaussians, inverse CDF), bridge in
// between. n*eta must be integral.
EnsembleSample sample_mixture(const PairMeasure& eta, int n, const Partition& part,
                              double beta, int steps, CounterRng& rng,
                              const InitialMeasure* m = nullptr);

struct Occupation {
    GridFunction density;  // integrates to 1 with weight h^d when overflow == 0
    long long overflow = 0;
    long long total = 0;
};

Occupation occupation(const EnsembleSample& s, const Grid& grid);

// Empirical law of (cell(start_i), cell(end_i)); throws when an endpoint
// falls outside every cell.
PairMeasure endpoint_pairs(const EnsembleSample& s, const Partition& part);

// One JSON line per sample: sigma, endpoints, log_weight, optional
// occupation histogram.
void write_sample_jsonl(std::ostream& os, const EnsembleSample& s,
                        const Occupation* occ = nullptr);

// Full paths as little-endian float64, shape (n, steps+1, dim).
void append_paths_binary(std::ostream& os, const EnsembleSample& s);
std::string paths_sidecar_json(const EnsembleSample& s, long long n_samples);

}  // namespace symbridge
