#include "symbridge/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace symbridge {

using nlohmann::json;

PairMeasure::PairMeasure(Eigen::MatrixXd entries) : e_(std::move(entries)) {
    if (e_.rows() != e_.cols() || e_.rows() < 1)
        throw config_error("pair measure: entries must be a nonempty square matrix");
    if ((e_.array() < 0.0).any())
        throw config_error("pair measure: entries must be nonnegative");
    double total = e_.sum();
    if (std::fabs(total - 1.0) > 1e-12)
        throw config_error("pair measure: entries sum to " + std::to_string(total) +
                           ", expected 1");
}

std::string PairMeasure::to_json() const {
    json j;
    j["sigma"] = sigma_size();
    std::vector<std::vector<double>> rows(sigma_size());
    for (int r = 0; r < sigma_size(); ++r)
        rows[r] = std::vector<double>(e_.row(r).begin(), e_.row(r).end());
    j["entries"] = rows;
    return j.dump();
}

PairMeasure PairMeasure::from_json(const std::string& text) {
    json j = json::parse(text);
    auto rows = j.at("entries").get<std::vector<std::vector<double>>>();
    int k = j.at("sigma").get<int>();
    Eigen::MatrixXd e(k, k);
    for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s) e(r, s) = rows.at(r).at(s);
    return PairMeasure(e);
}

IntMatrix pair_measure_numerators(const PairMeasure& eta, long long n) {
    const int k = eta.sigma_size();
    IntMatrix num(k, k);
    for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s) {
            double v = eta(r, s) * static_cast<double>(n);
            long long q = std::llround(v);
            if (std::fabs(v - static_cast<double>(q)) > 1e-9)
                throw precondition_error(
                    "pair measure: n*eta(" + std::to_string(r) + "," + std::to_string(s) +
                    ") = " + std::to_string(v) + " is not an integer");
            num(r, s) = q;
        }
    if (num.sum() != n)
        throw precondition_error("pair measure: numerators do not sum to n");
    return num;
}

long long CycleType::n() const {
    long long total = 0;
    for (size_t k = 0; k < counts.size(); ++k)
        total += static_cast<long long>(k + 1) * counts[k];
    return total;
}

CycleType cycle_type(std::span<const int> sigma) {
    const int n = static_cast<int>(sigma.size());
    std::vector<char> seen(n, 0);
    for (int v : sigma)
        if (v < 0 || v >= n || seen[v]++)
            throw precondition_error("cycle_type: input is not a bijection of {0..n-1}");
    std::fill(seen.begin(), seen.end(), 0);
    CycleType ct;
    ct.counts.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        int len = 0, j = i;
        while (!seen[j]) {
            seen[j] = 1;
            j = sigma[j];
            ++len;
        }
        ++ct.counts[len - 1];
    }
    return ct;
}

namespace {
BigInt factorial(long long n) {
    BigInt f = 1;
    for (long long i = 2; i <= n; ++i) f *= i;
    return f;
}

std::vector<long long> row_sums(const IntMatrix& m) {
    std::vector<long long> out(m.rows(), 0);
    for (int r = 0; r < m.rows(); ++r)
        for (int s = 0; s < m.cols(); ++s) out[r] += m(r, s);
    return out;
}

std::vector<long long> col_sums(const IntMatrix& m) {
    std::vector<long long> out(m.cols(), 0);
    for (int r = 0; r < m.rows(); ++r)
        for (int s = 0; s < m.cols(); ++s) out[s] += m(r, s);
    return out;
}

void require_equal_marginals(const IntMatrix& num) {
    if (row_sums(num) != col_sums(num))
        throw precondition_error("counting: eta must have equal marginals");
}
}  // namespace

BigInt count_sym_total(const PairMeasure& eta, long long n) {
    IntMatrix num = pair_measure_numerators(eta, n);
    require_equal_marginals(num);
    BigInt v = factorial(n);
    for (long long m : row_sums(num)) v *= factorial(m);
    for (int r = 0; r < num.rows(); ++r)
        for (int s = 0; s < num.cols(); ++s) v /= factorial(num(r, s));
    return v;
}

FixedRCount count_sym_fixed_R(std::span<const int> R, const PairMeasure& eta, long long n) {
    IntMatrix num = pair_measure_numerators(eta, n);
    require_equal_marginals(num);
    if (static_cast<long long>(R.size()) != n)
        throw precondition_error("count_sym_fixed_R: R must have length n");
    const int k = eta.sigma_size();
    std::vector<long long> emp(k, 0);
    for (int r : R) {
        if (r < 0 || r >= k)
            throw precondition_error("count_sym_fixed_R: label out of range");
        ++emp[r];
    }
    if (emp != row_sums(num)) return FixedRCount{0, true};
    BigInt v = 1;
    for (long long m : row_sums(num)) {
        BigInt f = factorial(m);
        v *= f * f;
    }
    for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s) v /= factorial(num(r, s));
    return FixedRCount{v, false};
}

namespace {
// Literal per-(sigma, R) match tally used by both brute-force entry points.
bool matches(const std::vector<int>& R, const std::vector<int>& sigma,
             const IntMatrix& target, std::vector<long long>& scratch) {
    const int k = static_cast<int>(target.rows());
    std::fill(scratch.begin(), scratch.end(), 0);
    for (size_t i = 0; i < R.size(); ++i) {
        int cell = R[i] * k + R[sigma[i]];
        if (++scratch[cell] > target(R[i], R[sigma[i]])) return false;
    }
    return true;  // total counts equal, so no undershoot is possible
}
}  // namespace

BigInt brute_force_count_fixed_R(std::span<const int> R, const PairMeasure& eta) {
    const int n = static_cast<int>(R.size());
    if (n > 8) throw precondition_error("brute_force_count_fixed_R: n <= 8 required");
    IntMatrix num = pair_measure_numerators(eta, n);
    const int k = eta.sigma_size();
    std::vector<int> Rv(R.begin(), R.end());
    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::vector<long long> scratch(k * k);
    BigInt count = 0;
    do {
        if (matches(Rv, sigma, num, scratch)) ++count;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return count;
}

BigInt brute_force_count(int n, int sigma_size, const PairMeasure& eta) {
    if (n > 8 || sigma_size > 3)
        throw precondition_error(
            "brute_force_count: enumeration guard n <= 8, |Sigma| <= 3 exceeded (got n=" +
            std::to_string(n) + ", |Sigma|=" + std::to_string(sigma_size) + ")");
    if (eta.sigma_size() != sigma_size)
        throw precondition_error("brute_force_count: sigma_size mismatch");
    IntMatrix num = pair_measure_numerators(eta, n);

    std::vector<int> R(n, 0);
    std::vector<int> sigma(n);
    std::vector<long long> scratch(sigma_size * sigma_size);
    BigInt count = 0;
    while (true) {
        std::iota(sigma.begin(), sigma.end(), 0);
        do {
            if (matches(R, sigma, num, scratch)) ++count;
        } while (std::next_permutation(sigma.begin(), sigma.end()));
        int pos = n - 1;
        while (pos >= 0 && R[pos] == sigma_size - 1) R[pos--] = 0;
        if (pos < 0) break;
        ++R[pos];
    }
    return count;
}

namespace {
// Update rules of the rounding construction for a fixed pivot (r0, s0).
// Returns numerators or an empty matrix when some entry goes negative.
IntMatrix try_round(const Eigen::MatrixXd& eta, long long n, int r0, int s0) {
    const int k = static_cast<int>(eta.rows());
    Eigen::VectorXd rowm = eta.rowwise().sum();
    auto fl = [n](double x) {
        return static_cast<long long>(std::floor(n * x + 1e-9));
    };
    IntMatrix out = IntMatrix::Zero(k, k);
    for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s)
            if (r != r0 && s != s0) out(r, s) = fl(eta(r, s));
    for (int r = 0; r < k; ++r) {
        if (r == r0) continue;
        long long acc = 0;
        for (int s = 0; s < k; ++s)
            if (s != s0) acc += out(r, s);
        out(r, s0) = fl(rowm(r)) - acc;
    }
    for (int s = 0; s < k; ++s) {
        if (s == r0 || s == s0) continue;
        long long acc = 0;
        for (int r = 0; r < k; ++r)
            if (r != r0) acc += out(r, s);
        out(r0, s) = fl(rowm(s)) - acc;
    }
    {
        long long acc = 0;
        for (int r = 0; r < k; ++r)
            if (r != r0) acc += fl(rowm(r)) + out(r, r0);
        out(r0, r0) = n - acc;
    }
    {
        long long acc = 0;
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s)
                if (r != r0 || s != s0) acc += out(r, s);
        out(r0, s0) = n - acc;
    }
    if ((out.array() < 0).any()) return IntMatrix();
    return out;
}
}  // namespace

PairMeasure round_pair_measure(const PairMeasure& eta, long long n) {
    const int k = eta.sigma_size();
    if (k < 2)
        throw precondition_error("round_pair_measure: needs an off-diagonal pair, |Sigma| >= 2");
    if (eta.marginal_gap() > 1e-9)
        throw precondition_error("round_pair_measure: eta must have equal marginals (gap " +
                                 std::to_string(eta.marginal_gap()) + ")");
    const double threshold = 2.0 * k * k / static_cast<double>(n);

    // Lexicographically smallest admissible pivot first; pivots below the
    // lemma's threshold are still tried (the hypothesis is sufficient, not
    // necessary) before giving up.
    std::vector<std::pair<int, int>> pivots;
    for (int pass = 0; pass < 2; ++pass)
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s) {
                if (r == s) continue;
                bool strong = eta(r, s) >= threshold;
                if ((pass == 0) == strong) pivots.emplace_back(r, s);
            }

    for (auto [r0, s0] : pivots) {
        IntMatrix out = try_round(eta.entries(), n, r0, s0);
        if (out.size() == 0) continue;
        // exact postconditions on the integer numerators
        if (out.sum() != n) continue;
        if (row_sums(out) != col_sums(out)) continue;
        bool dev_ok = true;
        for (int r = 0; r < k && dev_ok; ++r)
            for (int s = 0; s < k && dev_ok; ++s)
                dev_ok = std::fabs(static_cast<double>(out(r, s)) / n - eta(r, s)) <=
                         threshold + 1e-12;
        if (!dev_ok) continue;
        Eigen::MatrixXd e(k, k);
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s)
                e(r, s) = static_cast<double>(out(r, s)) / static_cast<double>(n);
        return PairMeasure(e);
    }
    throw precondition_error(
        "round_pair_measure: no off-diagonal pivot admits the rounding; the lemma's "
        "hypothesis eta(r0,s0) >= 2|Sigma|^2/n fails for every candidate");
}

StirlingSandwich stirling_sandwich(long long n) {
    if (n < 1) throw precondition_error("stirling_sandwich: n >= 1 required");
    const double pi = 3.14159265358979323846;
    double log_ratio = std::lgamma(static_cast<double>(n) + 1.0) -
                       (n * std::log(static_cast<double>(n)) - n) -
                       0.5 * std::log(2.0 * pi * n);
    StirlingSandwich s;
    s.ratio = std::exp(log_ratio);
    s.lower = 1.0;
    s.upper = std::exp(1.0);  // sqrt(C / 2 pi) with C = 2 pi e^2
    s.within = s.ratio >= s.lower && s.ratio <= s.upper;
    return s;
}

}  // namespace symbridge
