#include "symbridge/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <nlohmann/json.hpp>

namespace symbridge {

using nlohmann::json;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

InitialMeasure InitialMeasure::atoms(std::vector<Point> pts, std::vector<double> weights,
                                     int dim) {
    if (pts.empty() || pts.size() != weights.size())
        throw config_error("initial measure: atoms and weights must be nonempty and match");
    InitialMeasure m;
    m.is_atoms_ = true;
    m.dim_ = dim;
    m.atoms_ = std::move(pts);
    m.weights_ = std::move(weights);
    double total = 0.0;
    for (double w : m.weights_) {
        if (w < 0.0) throw config_error("initial measure: atom weights must be >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw config_error("initial measure: total mass must be positive");
    m.total_mass_ = total;
    m.cum_.resize(m.weights_.size());
    double acc = 0.0;
    for (size_t i = 0; i < m.weights_.size(); ++i) {
        acc += m.weights_[i] / total;
        m.cum_[i] = acc;
    }
    m.cum_.back() = 1.0;
    return m;
}

InitialMeasure InitialMeasure::uniform_box(const std::vector<double>& lo,
                                           const std::vector<double>& hi) {
    if (lo.empty() || lo.size() != hi.size() || lo.size() > kMaxDim)
        throw config_error("initial measure: box lo/hi must have matching length <= 3");
    InitialMeasure m;
    m.is_atoms_ = false;
    m.dim_ = static_cast<int>(lo.size());
    double vol = 1.0;
    for (int a = 0; a < m.dim_; ++a) {
        if (!(hi[a] > lo[a])) throw config_error("initial measure: box hi must exceed lo");
        m.lo_[a] = lo[a];
        m.hi_[a] = hi[a];
        vol *= hi[a] - lo[a];
    }
    m.total_mass_ = vol;
    return m;
}

Point InitialMeasure::sample(CounterRng& rng) const {
    Point x{};
    if (is_atoms_) {
        double u = rng.uniform();
        size_t i = std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin();
        if (i >= atoms_.size()) i = atoms_.size() - 1;
        return atoms_[i];
    }
    for (int a = 0; a < dim_; ++a) x[a] = lo_[a] + (hi_[a] - lo_[a]) * rng.uniform();
    return x;
}

Point InitialMeasure::sample_in_cell(const Point& clo, const Point& chi,
                                     CounterRng& rng) const {
    if (!is_atoms_) {
        Point x{};
        for (int a = 0; a < dim_; ++a) {
            double lo = std::max(clo[a], lo_[a]);
            double hi = std::min(chi[a], hi_[a]);
            if (!(hi > lo))
                throw config_error("initial measure: cell does not intersect the box");
            x[a] = lo + (hi - lo) * rng.uniform();
        }
        return x;
    }
    double total = 0.0;
    for (size_t i = 0; i < atoms_.size(); ++i) {
        bool in = true;
        for (int a = 0; a < dim_ && in; ++a)
            in = atoms_[i][a] >= clo[a] && atoms_[i][a] < chi[a];
        if (in) total += weights_[i];
    }
    if (!(total > 0.0))
        throw config_error("initial measure: no atom mass inside the requested cell");
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < atoms_.size(); ++i) {
        bool in = true;
        for (int a = 0; a < dim_ && in; ++a)
            in = atoms_[i][a] >= clo[a] && atoms_[i][a] < chi[a];
        if (!in) continue;
        acc += weights_[i];
        if (u <= acc) return atoms_[i];
    }
    return atoms_.back();
}

Partition Partition::uniform(const std::vector<double>& lo, const std::vector<double>& hi,
                             const std::vector<int>& cells) {
    if (lo.empty() || lo.size() != hi.size() || lo.size() != cells.size() ||
        lo.size() > kMaxDim)
        throw config_error("partition: lo/hi/cells must have matching length <= 3");
    Partition p;
    p.dim = static_cast<int>(lo.size());
    for (int a = 0; a < p.dim; ++a) {
        if (!(hi[a] > lo[a])) throw config_error("partition: hi must exceed lo");
        if (cells[a] < 1) throw config_error("partition: cells must be >= 1 per axis");
        p.lo[a] = lo[a];
        p.hi[a] = hi[a];
        p.cells[a] = cells[a];
    }
    return p;
}

double Partition::fineness() const {
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) d2 += width(a) * width(a);
    return std::sqrt(d2);
}

int Partition::locate(const Point& x) const {
    int idx = 0;
    for (int a = 0; a < dim; ++a) {
        if (x[a] < lo[a] || x[a] > hi[a]) return -1;
        int c = static_cast<int>((x[a] - lo[a]) / width(a));
        if (c >= cells[a]) c = cells[a] - 1;  // last cell per axis is closed
        idx = idx * cells[a] + c;
    }
    return idx;
}

void Partition::cell_bounds(int r, Point& clo, Point& chi) const {
    std::array<int, kMaxDim> idx{};
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = r % cells[a];
        r /= cells[a];
    }
    for (int a = 0; a < dim; ++a) {
        clo[a] = lo[a] + idx[a] * width(a);
        chi[a] = lo[a] + (idx[a] + 1) * width(a);
    }
}

std::vector<double> Partition::cell_volumes() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= width(a);
    return std::vector<double>(size(), v);
}

std::vector<double> Partition::lebesgue_weights() const {
    return std::vector<double>(size(), 1.0 / size());
}

double log_gaussian_pair(const Point& x, const Point& y, int dim, double beta) {
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) d2 += (x[a] - y[a]) * (x[a] - y[a]);
    return -0.5 * dim * std::log(4.0 * kPi * beta) - d2 / (4.0 * beta);
}

Path sample_bridge(const Point& x, const Point& y, int dim, double beta, int steps,
                   CounterRng& rng) {
    if (steps < 1) throw precondition_error("sample_bridge: steps must be >= 1");
    if (!(beta > 0.0)) throw precondition_error("sample_bridge: beta must be > 0");
    Path path;
    path.beta = beta;
    path.dim = dim;
    path.pts.resize((steps + 1) * dim);

    const double tau = beta / steps;
    const double sd = std::sqrt(2.0 * tau);
    // free walk W, then the affine correction B_t = W_t + (t/beta)(y - W_beta)
    for (int a = 0; a < dim; ++a) path.pts[a] = x[a];
    for (int j = 1; j <= steps; ++j)
        for (int a = 0; a < dim; ++a)
            path.pts[j * dim + a] = path.pts[(j - 1) * dim + a] + sd * rng.normal();
    for (int a = 0; a < dim; ++a) {
        const double drift = y[a] - path.pts[steps * dim + a];
        for (int j = 1; j < steps; ++j)
            path.pts[j * dim + a] += drift * (static_cast<double>(j) / steps);
        path.pts[steps * dim + a] = y[a];  // exact endpoint
        path.pts[a] = x[a];
    }
    return path;
}

EnsembleSample sample_sym(const InitialMeasure& m, int n, double beta, int steps,
                          const LogPairWeight* g, CounterRng& rng) {
    if (n < 1) throw precondition_error("sample_sym: n must be >= 1");
    EnsembleSample s;
    s.n = n;
    s.dim = m.dim();
    s.beta = beta;
    s.sigma.resize(n);
    std::iota(s.sigma.begin(), s.sigma.end(), 0);
    // Fisher-Yates over the counter-based stream
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(i) + 1));
        std::swap(s.sigma[i], s.sigma[j]);
    }
    s.starts.resize(static_cast<size_t>(n) * s.dim);
    for (int i = 0; i < n; ++i) {
        Point x = m.sample(rng);
        for (int a = 0; a < s.dim; ++a) s.starts[i * s.dim + a] = x[a];
    }
    s.paths.reserve(n);
    s.log_weight = 0.0;
    for (int i = 0; i < n; ++i) {
        Point x = s.start(i);
        Point y = s.start(s.sigma[i]);
        s.paths.push_back(sample_bridge(x, y, s.dim, beta, steps, rng));
        if (g) s.log_weight += (*g)(x, y);
    }
    return s;
}

namespace {
// Inverse-CDF draw from the heat-kernel tilt p_beta(x,.) restricted to
// [a,b): a Gaussian with mean mu and variance 2*beta truncated per axis.
double truncated_gaussian(double mu, double beta, double a, double b, CounterRng& rng) {
    const double sd = std::sqrt(2.0 * beta);
    double ca = normal_cdf((a - mu) / sd);
    double cb = normal_cdf((b - mu) / sd);
    if (!(cb > ca)) return 0.5 * (a + b);  // numerically empty tail
    double u = ca + (cb - ca) * rng.uniform();
    double z = normal_quantile(std::min(std::max(u, 1e-300), 1.0 - 1e-16));
    return std::min(std::max(mu + sd * z, a), std::nextafter(b, a));
}
}  // namespace

EnsembleSample sample_mixture(const PairMeasure& eta, int n, const Partition& part,
                              double beta, int steps, CounterRng& rng,
                              const InitialMeasure* m) {
    if (eta.sigma_size() != part.size())
        throw config_error("sample_mixture: eta index set must match the partition");
    const int k = part.size();
    IntMatrix counts(k, k);
    for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s) {
            double v = eta(r, s) * n;
            long long q = std::llround(v);
            if (std::fabs(v - static_cast<double>(q)) > 1e-9)
                throw precondition_error("sample_mixture: n*eta(" + std::to_string(r) + "," +
                                         std::to_string(s) + ") = " + std::to_string(v) +
                                         " is not an integer; round_pair_measure first");
            counts(r, s) = q;
        }

    InitialMeasure fallback = InitialMeasure::uniform_box(
        std::vector<double>(part.lo.begin(), part.lo.begin() + part.dim),
        std::vector<double>(part.hi.begin(), part.hi.begin() + part.dim));
    const InitialMeasure& start_m = m ? *m : fallback;

    EnsembleSample out;
    out.n = n;
    out.dim = part.dim;
    out.beta = beta;
    out.starts.resize(static_cast<size_t>(n) * part.dim);
    out.paths.reserve(n);
    int idx = 0;
    for (int r = 0; r < k; ++r) {
        Point rlo, rhi;
        part.cell_bounds(r, rlo, rhi);
        for (int s = 0; s < k; ++s) {
            Point slo, shi;
            part.cell_bounds(s, slo, shi);
            for (long long c = 0; c < counts(r, s); ++c, ++idx) {
                Point x = start_m.sample_in_cell(rlo, rhi, rng);
                Point y{};
                for (int a = 0; a < part.dim; ++a)
                    y[a] = truncated_gaussian(x[a], beta, slo[a], shi[a], rng);
                for (int a = 0; a < part.dim; ++a) out.starts[idx * part.dim + a] = x[a];
                out.paths.push_back(sample_bridge(x, y, part.dim, beta, steps, rng));
            }
        }
    }
    return out;
}

Occupation occupation(const EnsembleSample& s, const Grid& grid) {
    if (grid.dim != s.dim) throw config_error("occupation: grid dimension mismatch");
    Occupation occ;
    occ.density = GridFunction::constant(grid, 0.0);
    std::vector<long long> counts(grid.points(), 0);
    for (const Path& p : s.paths) {
        const int M = p.steps();
        for (int j = 0; j <= M; ++j) {
            Point x = p.point_at(j);
            if (!grid.inside_box(x)) {
                ++occ.overflow;
                ++occ.total;
                continue;
            }
            // nearest interior point; outer half-layers clamp inward
            std::array<int, kMaxDim> idx{};
            for (int a = 0; a < grid.dim; ++a) {
                int i = static_cast<int>(std::lround((x[a] - grid.lo[a]) / grid.spacing(a))) - 1;
                idx[a] = std::min(std::max(i, 0), grid.n[a] - 1);
            }
            ++counts[grid.flat(idx)];
            ++occ.total;
        }
    }
    const long long inside = occ.total - occ.overflow;
    if (inside > 0) {
        const double norm = 1.0 / (static_cast<double>(inside) * grid.cell_volume());
        for (int i = 0; i < grid.points(); ++i)
            occ.density.values[i] = counts[i] * norm;
    }
    return occ;
}

PairMeasure endpoint_pairs(const EnsembleSample& s, const Partition& part) {
    const int k = part.size();
    Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < s.n; ++i) {
        Point x = s.start(i);
        Point y = s.paths[i].point_at(s.paths[i].steps());
        int r = part.locate(x);
        int c = part.locate(y);
        if (r < 0 || c < 0)
            throw precondition_error(
                "endpoint_pairs: an endpoint lies outside every cell; the partition must "
                "cover the box");
        freq(r, c) += 1.0;
    }
    freq /= static_cast<double>(s.n);
    return PairMeasure(freq);
}

void write_sample_jsonl(std::ostream& os, const EnsembleSample& s, const Occupation* occ) {
    json j;
    j["n"] = s.n;
    j["beta"] = s.beta;
    j["sigma"] = s.sigma;
    std::vector<std::vector<double>> ends(s.n);
    for (int i = 0; i < s.n; ++i) {
        const Path& p = s.paths[i];
        auto e = p.point(p.steps());
        ends[i] = std::vector<double>(e.begin(), e.end());
    }
    j["endpoints"] = ends;
    j["log_weight"] = s.log_weight;
    j["rng_key"] = s.rng_key;
    if (occ) {
        j["occupation"] = occ->density.values;
        j["occupation_overflow"] = occ->overflow;
    }
    os << j.dump() << "\n";
}

namespace {
void put_le_double(std::ostream& os, double v) {
    static_assert(sizeof(double) == 8);
    unsigned char buf[8];
    std::memcpy(buf, &v, 8);
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    std::reverse(buf, buf + 8);
#endif
    os.write(reinterpret_cast<const char*>(buf), 8);
}
}  // namespace

void append_paths_binary(std::ostream& os, const EnsembleSample& s) {
    for (const Path& p : s.paths)
        for (double v : p.pts) put_le_double(os, v);
}

std::string paths_sidecar_json(const EnsembleSample& s, long long n_samples) {
    json j;
    j["dtype"] = "float64";
    j["byte_order"] = "little";
    j["shape"] = {n_samples, s.n, s.paths.empty() ? 0 : s.paths[0].steps() + 1, s.dim};
    j["order"] = "C";
    j["beta"] = s.beta;
    return j.dump();
}

}  // namespace symbridge
