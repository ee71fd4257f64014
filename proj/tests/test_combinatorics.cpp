#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "symbridge/combinatorics.hpp"
#include "symbridge/rng.hpp"

using namespace symbridge;

namespace {
PairMeasure from_ints(std::vector<std::vector<long long>> rows, long long n) {
    int k = static_cast<int>(rows.size());
    Eigen::MatrixXd e(k, k);
    for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s)
            e(r, s) = static_cast<double>(rows[r][s]) / static_cast<double>(n);
    return PairMeasure(e);
}
}  // namespace

TEST_SUITE_BEGIN("combinatorics");

TEST_CASE("cycle types of simple permutations") {
    std::vector<int> id{0, 1, 2, 3, 4};
    CycleType ct = cycle_type(id);
    CHECK(ct.counts[0] == 5);
    CHECK(ct.n() == 5);

    std::vector<int> four{1, 2, 3, 0};
    CHECK(cycle_type(four).counts[3] == 1);

    std::vector<int> bad{0, 0, 2};
    CHECK_THROWS_AS(cycle_type(bad), precondition_error);
}

TEST_CASE("cycle lengths always partition n") {
    CounterRng rng(8);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 1 + static_cast<int>(rng.bounded(40));
        std::vector<int> sigma(n);
        std::iota(sigma.begin(), sigma.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(sigma[i], sigma[rng.bounded(i + 1)]);
        CHECK(cycle_type(sigma).n() == n);
    }
}

TEST_CASE("cycle counts reproduce the Stirling generating polynomial on S4") {
    std::vector<int> sigma{0, 1, 2, 3};
    for (long long z : {2, 3, 5}) {
        long long total = 0;
        std::vector<int> s = sigma;
        do {
            CycleType ct = cycle_type(s);
            long long cycles = std::accumulate(ct.counts.begin(), ct.counts.end(), 0LL);
            long long term = 1;
            for (int i = 0; i < cycles; ++i) term *= z;
            total += term;
        } while (std::next_permutation(s.begin(), s.end()));
        CHECK(total == z * (z + 1) * (z + 2) * (z + 3));
    }
}

TEST_CASE("counting identities on the spec instances") {
    PairMeasure offdiag = from_ints({{0, 1}, {1, 0}}, 2);
    CHECK(count_sym_total(offdiag, 2) == BigInt(2));
    CHECK(brute_force_count(2, 2, offdiag) == BigInt(2));

    PairMeasure three = from_ints({{1, 1}, {1, 0}}, 3);
    CHECK(count_sym_total(three, 3) == BigInt(12));
    CHECK(brute_force_count(3, 2, three) == BigInt(12));

    // eta concentrated on one diagonal cell: every permutation qualifies
    PairMeasure diag = from_ints({{5, 0}, {0, 0}}, 5);
    CHECK(count_sym_total(diag, 5) == BigInt(120));
    CHECK(brute_force_count(5, 2, diag) == BigInt(120));
}

TEST_CASE("fixed-R counts and the marginal-mismatch flag") {
    PairMeasure offdiag = from_ints({{0, 1}, {1, 0}}, 2);
    std::vector<int> R{0, 1};
    FixedRCount c = count_sym_fixed_R(R, offdiag, 2);
    CHECK_FALSE(c.marginal_mismatch);
    CHECK(c.count == BigInt(1));
    CHECK(brute_force_count_fixed_R(R, offdiag) == BigInt(1));

    PairMeasure three = from_ints({{1, 1}, {1, 0}}, 3);
    std::vector<int> R3{0, 0, 1};
    FixedRCount c3 = count_sym_fixed_R(R3, three, 3);
    CHECK(c3.count == BigInt(4));
    CHECK(brute_force_count_fixed_R(R3, three) == BigInt(4));

    std::vector<int> wrong{0, 1, 1};
    FixedRCount cw = count_sym_fixed_R(wrong, three, 3);
    CHECK(cw.marginal_mismatch);
    CHECK(cw.count == BigInt(0));
}

TEST_CASE("formula equals enumeration for every small equal-marginal eta") {
    for (int n = 1; n <= 4; ++n) {
        for (int k = 1; k <= 3; ++k) {
            // enumerate all k x k nonnegative integer tables with sum n
            std::vector<long long> flat(k * k, 0);
            std::function<void(int, long long)> rec = [&](int pos, long long left) {
                if (pos == k * k - 1) {
                    flat[pos] = left;
                    std::vector<long long> rows(k, 0), cols(k, 0);
                    for (int r = 0; r < k; ++r)
                        for (int s = 0; s < k; ++s) {
                            rows[r] += flat[r * k + s];
                            cols[s] += flat[r * k + s];
                        }
                    if (rows != cols) return;
                    std::vector<std::vector<long long>> tab(k, std::vector<long long>(k));
                    for (int r = 0; r < k; ++r)
                        for (int s = 0; s < k; ++s) tab[r][s] = flat[r * k + s];
                    PairMeasure eta = from_ints(tab, n);
                    CHECK(count_sym_total(eta, n) == brute_force_count(n, k, eta));
                    std::vector<int> R;
                    for (int r = 0; r < k; ++r) R.insert(R.end(), rows[r], r);
                    CHECK(count_sym_fixed_R(R, eta, n).count ==
                          brute_force_count_fixed_R(R, eta));
                    return;
                }
                for (long long v = 0; v <= left; ++v) {
                    flat[pos] = v;
                    rec(pos + 1, left - v);
                }
            };
            rec(0, n);
        }
    }
}

TEST_CASE("preconditions of the counting operations") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.1, 0.1, 0.3;  // not on the 1/4 grid
    CHECK_THROWS_AS(count_sym_total(PairMeasure(bad), 4), precondition_error);
    PairMeasure ok = from_ints({{1, 1}, {1, 1}}, 4);
    CHECK_THROWS_AS(brute_force_count(9, 2, ok), precondition_error);
    Eigen::MatrixXd big = Eigen::MatrixXd::Constant(4, 4, 1.0 / 16.0);
    CHECK_THROWS_AS(brute_force_count(4, 4, PairMeasure(big)), precondition_error);
}

TEST_CASE("rounding reproduces the hand-computed instance") {
    Eigen::MatrixXd e(2, 2);
    e << 0.27, 0.23, 0.23, 0.27;
    PairMeasure rounded = round_pair_measure(PairMeasure(e), 10);
    IntMatrix num = pair_measure_numerators(rounded, 10);
    CHECK(num(0, 0) == 3);
    CHECK(num(0, 1) == 2);
    CHECK(num(1, 0) == 2);
    CHECK(num(1, 1) == 3);
}

TEST_CASE("rounding is idempotent and fixes on-grid measures") {
    Eigen::MatrixXd e(2, 2);
    e << 0.3, 0.2, 0.2, 0.3;
    PairMeasure eta(e);
    PairMeasure r1 = round_pair_measure(eta, 100);
    CHECK((r1.entries() - e).cwiseAbs().maxCoeff() < 1e-14);
    PairMeasure r2 = round_pair_measure(r1, 100);
    CHECK((r2.entries() - r1.entries()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rounding rejects unusable inputs") {
    Eigen::MatrixXd one(1, 1);
    one << 1.0;
    CHECK_THROWS_AS(round_pair_measure(PairMeasure(one), 10), precondition_error);
    Eigen::MatrixXd skew(2, 2);
    skew << 0.5, 0.3, 0.1, 0.1;  // unequal marginals
    CHECK_THROWS_AS(round_pair_measure(PairMeasure(skew), 10), precondition_error);
}

TEST_CASE("rounding postconditions on random instances") {
    CounterRng rng(99);
    int done = 0;
    while (done < 200) {
        int k = 2 + static_cast<int>(rng.bounded(3));
        long long n = std::vector<long long>{50, 100, 500}[rng.bounded(3)];
        Eigen::MatrixXd raw(k, k);
        for (int i = 0; i < k * k; ++i) raw(i) = rng.uniform() + 1e-3;
        Eigen::MatrixXd sym = 0.5 * (raw + raw.transpose());
        sym /= sym.sum();
        double best = 0.0;
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s)
                if (r != s) best = std::max(best, sym(r, s));
        if (best < 2.0 * k * k / static_cast<double>(n)) continue;
        ++done;
        PairMeasure eta(sym);
        PairMeasure rounded = round_pair_measure(eta, n);
        IntMatrix num = pair_measure_numerators(rounded, n);
        CHECK(num.sum() == n);
        CHECK(num.minCoeff() >= 0);
        std::vector<long long> rows(k, 0), cols(k, 0);
        double dev = 0.0;
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s) {
                rows[r] += num(r, s);
                cols[s] += num(r, s);
                dev = std::max(dev, std::fabs(rounded(r, s) - eta(r, s)));
            }
        CHECK(rows == cols);
        CHECK(dev <= 2.0 * k * k / static_cast<double>(n) + 1e-12);
    }
}

TEST_CASE("stirling sandwich values and monotonicity") {
    StirlingSandwich s1 = stirling_sandwich(1);
    CHECK(s1.ratio == doctest::Approx(std::exp(1.0) / std::sqrt(2.0 * 3.14159265358979324))
                          .epsilon(1e-12));
    CHECK(s1.within);
    CHECK(s1.upper == doctest::Approx(std::exp(1.0)));

    StirlingSandwich s10 = stirling_sandwich(10);
    // independent arithmetic route
    double direct = 3628800.0 /
                    (std::pow(10.0 / std::exp(1.0), 10.0) *
                     std::sqrt(2.0 * 3.14159265358979324 * 10.0));
    CHECK(s10.ratio == doctest::Approx(direct).epsilon(1e-12));
    CHECK(s10.ratio == doctest::Approx(1.00837).epsilon(1e-4));

    double prev = 2.0;
    for (long long n = 1; n <= 50; ++n) {
        StirlingSandwich s = stirling_sandwich(n);
        CHECK(s.within);
        CHECK(s.ratio < prev);
        prev = s.ratio;
    }
    CHECK_THROWS_AS(stirling_sandwich(0), precondition_error);
}

TEST_CASE("pair measure serialization round trip") {
    Eigen::MatrixXd e(2, 2);
    e << 0.3, 0.2, 0.2, 0.3;
    PairMeasure m(e);
    PairMeasure back = PairMeasure::from_json(m.to_json());
    CHECK((back.entries() - e).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.marginal_gap() == 0.0);
}

TEST_SUITE_END();
