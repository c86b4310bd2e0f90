#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "nvtwist/modarith.hpp"
#include "nvtwist/rational.hpp"

namespace nvtwist {

/// S(1, m, q) for every m mod q. Any S(a, b, q) reduces to a lookup.
class KloostermanTable {
 public:
  explicit KloostermanTable(std::shared_ptr<const PrimeModulus> modulus);

  const PrimeModulus& modulus() const noexcept { return *modulus_; }

  /// S(a, b, q) = sum over units x of e((a x + b x^{-1}) / q).
  double operator()(std::int64_t a, std::int64_t b) const noexcept;
  /// S(1, m, q).
  double s1(std::uint32_t m) const noexcept { return values_[m]; }

 private:
  std::shared_ptr<const PrimeModulus> modulus_;
  std::vector<double> values_;
};

/// S(a, b, q) summed term by term as a complex number, without the table.
Complex kloosterman_direct(std::int64_t a, std::int64_t b, const PrimeModulus& modulus);

/// True iff every value in the tuple occurs at least twice. The tuple length
/// must be even and at least 2.
bool in_D(std::span<const std::uint32_t> tuple);

/// sum_{h=1}^{q-1} prod_i S(h, r_i, q).
double moment_sum(std::span<const std::uint32_t> rs, const KloostermanTable& table);

/// The same sum rounded to the integer it always is (it is fixed by every
/// Galois automorphism). Throws if the floating value is not near an integer.
std::int64_t moment_sum_integer(std::span<const std::uint32_t> rs, const KloostermanTable& table);

/// Full enumeration of
///   sum_{r_1..r_2k <= R} |z_r1|...|z_r2k| |sum*_h S(h,r_1,q)...S(h,r_2k,q)|
/// split over the tuples in D and its complement, with both bound terms.
struct WeightedMomentReport {
  std::uint32_t q = 0;
  int k = 0;
  std::size_t R = 0;
  std::vector<Rational> moments;  ///< L_1 .. L_2k
  Rational diagonal;              ///< tuples in D
  Rational off_diagonal;          ///< tuples outside D
  Rational total;                 ///< recomputed over multisets
  std::uint64_t diagonal_tuples = 0;
  std::uint64_t off_diagonal_tuples = 0;
  double diagonal_bound = 0.0;      ///< L_1^k q^{k+1}
  double off_diagonal_bound = 0.0;  ///< L_1^{2k} q^{k+1/2}
  double diagonal_ratio = 0.0;
  double off_diagonal_ratio = 0.0;
  /// max over tuples outside D of |moment| / q^{k+1/2}.
  double max_off_diagonal_moment_ratio = 0.0;

  const Rational& l1() const { return moments.front(); }
  bool split_exact() const { return diagonal + off_diagonal == total; }
};

/// Weights z_1..z_R (z[0] is z_1). Rejects R >= q, k < 1, and weights that
/// break L_j <= L_1 (j = 2..2k) or L_1 >= 1.
WeightedMomentReport weighted_moment_report(std::span<const Rational> z, int k, const KloostermanTable& table);

/// Upper limit on R^{2k} accepted by weighted_moment_report.
inline constexpr std::uint64_t kMaxWeightedMomentTuples = 50'000'000;

}  // namespace nvtwist
