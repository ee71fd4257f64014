#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <span>
#include <string>
#include <vector>

#include "symbridge/errors.hpp"

namespace symbridge {

using BigInt = boost::multiprecision::cpp_int;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Nonnegative measure on Sigma x Sigma summing to 1.
class PairMeasure {
  public:
    explicit PairMeasure(Eigen::MatrixXd entries);

    int sigma_size() const { return static_cast<int>(e_.rows()); }
    const Eigen::MatrixXd& entries() const { return e_; }
    double operator()(int r, int s) const { return e_(r, s); }

    Eigen::VectorXd marginal_first() const { return e_.rowwise().sum(); }
    Eigen::VectorXd marginal_second() const { return e_.colwise().sum().transpose(); }
    double marginal_gap() const {
        return (marginal_first() - marginal_second()).cwiseAbs().maxCoeff();
    }

    std::string to_json() const;
    static PairMeasure from_json(const std::string& text);

  private:
    Eigen::MatrixXd e_;
};

// Exact numerators of n*eta; throws precondition_error when some entry is
// not integral (tolerance 1e-9 absolute on n*eta).
IntMatrix pair_measure_numerators(const PairMeasure& eta, long long n);

struct CycleType {
    std::vector<long long> counts;  // counts[k-1] = number of length-k cycles
    long long n() const;
};

CycleType cycle_type(std::span<const int> sigma);

// sum over R in Sigma^N of #Sym_N(R, eta)
//   = N! * prod_r (N etabar(r))! / prod_{r,s} (N eta(r,s))!
BigInt count_sym_total(const PairMeasure& eta, long long n);

struct FixedRCount {
    BigInt count;
    bool marginal_mismatch = false;  // L(R) != etabar -> count == 0
};

// #Sym_N(R, eta) = [prod_r (N etabar(r))!]^2 / prod_{r,s} (N eta(r,s))!
// for any R with empirical measure etabar.
FixedRCount count_sym_fixed_R(std::span<const int> R, const PairMeasure& eta,
                              long long n);

// Literal enumeration over Sym_n x Sigma^n; guards n <= 8, |Sigma| <= 3.
BigInt brute_force_count(int n, int sigma_size, const PairMeasure& eta);
// Literal enumeration over Sym_n for a fixed R; guard n <= 8.
BigInt brute_force_count_fixed_R(std::span<const int> R, const PairMeasure& eta);

// Rounds an equal-marginal eta onto the (1/n)-grid preserving total mass and
// equal marginals, with max entry deviation <= 2 |Sigma|^2 / n.  Off-diagonal
// pivot pairs are tried in lexicographic order, those satisfying the
// hypothesis eta(r0,s0) >= 2|Sigma|^2/n first.
PairMeasure round_pair_measure(const PairMeasure& eta, long long n);

struct StirlingSandwich {
    double ratio;        // N! / ((N/e)^N sqrt(2 pi N))
    double lower;        // 1
    double upper;        // sqrt(C / 2 pi) with C = 2 pi e^2, i.e. e
    bool within;
};

StirlingSandwich stirling_sandwich(long long n);

}  // namespace symbridge
