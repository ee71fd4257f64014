#include "symbridge/bosegas.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "symbridge/kernels.hpp"

namespace symbridge {

namespace {
constexpr double kPi = 3.14159265358979323846;

double logsumexp(const std::vector<double>& v) {
    double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}
}  // namespace

Spectrum spectrum(const Grid& grid, const GridFunction& W, int k) {
    if (!(W.grid == grid)) throw config_error("spectrum: W lives on another grid");
    for (double v : W.values)
        if (!std::isfinite(v))
            throw precondition_error("spectrum: W must be finite on interior points");
    Spectrum out;
    out.source = "finite-difference";
    if (k > grid.points()) {
        out.clipped = true;
        k = grid.points();
    }
    // -Delta + W = -(Delta - W): negate the FD operator of Delta + (-W)
    GridFunction negW = W;
    for (double& v : negW.values) v = -v;
    Eigen::MatrixXd A = -fd_operator(grid, negW);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw numerical_error("spectrum: dense eigensolver failed");
    out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    return out;
}

Spectrum analytic_box_spectrum(const std::vector<double>& lengths, int count) {
    if (lengths.empty() || lengths.size() > kMaxDim)
        throw config_error("analytic_box_spectrum: 1..3 axis lengths required");
    const int d = static_cast<int>(lengths.size());
    // enough per-axis modes that every omitted combination exceeds the kept ones
    int per_axis = count + 1;
    while (true) {
        std::vector<double> all;
        std::vector<int> idx(d, 1);
        std::function<void(int)> rec = [&](int a) {
            if (a == d) {
                double e = 0.0;
                for (int b = 0; b < d; ++b)
                    e += kPi * kPi * idx[b] * idx[b] / (lengths[b] * lengths[b]);
                all.push_back(e);
                return;
            }
            for (idx[a] = 1; idx[a] <= per_axis; ++idx[a]) rec(a + 1);
        };
        rec(0);
        std::sort(all.begin(), all.end());
        // safe cut: kept energies must beat the smallest omitted single-axis mode
        double omit = kPi * kPi * (per_axis + 1) * (per_axis + 1);
        for (double L : lengths) omit = std::min(omit, kPi * kPi * (per_axis + 1) *
                                                          (per_axis + 1) / (L * L));
        if (static_cast<int>(all.size()) >= count && all[count - 1] < omit) {
            Spectrum s;
            s.source = "analytic";
            s.energies.assign(all.begin(), all.begin() + count);
            return s;
        }
        ++per_axis;
    }
}

double log_z1(const Spectrum& spec, double t) {
    std::vector<double> terms(spec.energies.size());
    for (size_t i = 0; i < spec.energies.size(); ++i) terms[i] = -t * spec.energies[i];
    return logsumexp(terms);
}

PartitionTable partition_recursion(const Spectrum& spec, double beta, int n_max) {
    if (n_max < 1) throw precondition_error("partition_recursion: n_max >= 1 required");
    if (spec.energies.empty())
        throw precondition_error("partition_recursion: empty spectrum");
    if (!std::is_sorted(spec.energies.begin(), spec.energies.end()))
        throw precondition_error("partition_recursion: energies must be ascending");
    const double e1 = spec.energies.front();
    const double tail = std::exp(-beta * (spec.energies.back() - e1));
    if (tail >= 1e-16) {
        std::ostringstream os;
        os << "partition_recursion: spectrum truncation insufficient: "
              "e^{-beta (E_K - E_1)} = " << tail
           << " >= 1e-16 at K = " << spec.energies.size()
           << "; extend the spectrum until beta (E_K - E_1) >= 36.9";
        throw numerical_error(os.str());
    }

    PartitionTable table;
    table.beta = beta;
    table.logz.assign(n_max + 1, 0.0);  // log Z_0 = 0
    std::vector<double> logz1(n_max + 1, 0.0);
    for (int k = 1; k <= n_max; ++k) logz1[k] = log_z1(spec, k * beta);
    std::vector<double> terms;
    for (int N = 1; N <= n_max; ++N) {
        terms.clear();
        for (int k = 1; k <= N; ++k) terms.push_back(logz1[k] + table.logz[N - k]);
        table.logz[N] = logsumexp(terms) - std::log(static_cast<double>(N));
    }
    return table;
}

double brute_force_trace(const Spectrum& spec, double beta, int n) {
    const int K = static_cast<int>(spec.energies.size());
    if (n > 6 || K > 40)
        throw precondition_error(
            "brute_force_trace: enumeration guard n <= 6, K <= 40 exceeded");
    // multisets k_1 <= ... <= k_n, energies shifted by n*E_1 for stability
    const double e1 = spec.energies.front();
    double total = 0.0;
    std::vector<int> lvl(n, 0);
    while (true) {
        double e = 0.0;
        for (int i = 0; i < n; ++i) e += spec.energies[lvl[i]] - e1;
        total += std::exp(-beta * e);
        int pos = n - 1;
        while (pos >= 0 && lvl[pos] == K - 1) --pos;
        if (pos < 0) break;
        int v = ++lvl[pos];
        for (int i = pos + 1; i < n; ++i) lvl[i] = v;  // keep nondecreasing
    }
    return total * std::exp(-beta * e1 * n);
}

namespace {
// sum over integer partitions of n (as cycle types) of
//   prod_k Z_1(k beta)^{f_k} / (k^{f_k} f_k!)
void cycle_sum_rec(int remaining, int max_part, double log_acc,
                   const std::vector<double>& logz1, std::vector<double>& terms) {
    if (remaining == 0) {
        terms.push_back(log_acc);
        return;
    }
    for (int k = std::min(remaining, max_part); k >= 1; --k) {
        // take f_k copies of part k at once to account for the f_k! factor
        double acc = log_acc;
        for (int f = 1; f * k <= remaining; ++f) {
            acc += logz1[k] - std::log(static_cast<double>(k)) -
                   std::log(static_cast<double>(f));
            cycle_sum_rec(remaining - f * k, k - 1, acc, logz1, terms);
        }
    }
}
}  // namespace

double cycle_sum_log_trace(const Spectrum& spec, double beta, int n) {
    if (n > 8) throw precondition_error("cycle_sum_log_trace: n <= 8 required");
    std::vector<double> logz1(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) logz1[k] = log_z1(spec, k * beta);
    std::vector<double> terms;
    cycle_sum_rec(n, n, 0.0, logz1, terms);
    return logsumexp(terms);
}

LdpReport ldp_check(const PartitionTable& table, const Spectrum& spec, double beta,
                    std::optional<double> beta_lambda_w) {
    const int n_max = static_cast<int>(table.logz.size()) - 1;
    if (n_max < 32) throw precondition_error("ldp_check: table length >= 32 required");
    LdpReport rep;
    rep.target = -beta * spec.energies.front();
    rep.beta_lambda_w = beta_lambda_w;
    rep.a.resize(n_max);
    rep.deviation.resize(n_max);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int N = 1; N <= n_max; ++N) {
        double a = table.logz[N] / N;
        rep.a[N - 1] = a;
        rep.deviation[N - 1] = std::fabs(a - rep.target);
        double x = std::log(static_cast<double>(N)) / N;
        double y = a - rep.target;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n_max * sxx - sx * sx;
    rep.slope = denom != 0.0 ? (n_max * sxy - sx * sy) / denom : 0.0;
    return rep;
}

}  // namespace symbridge
