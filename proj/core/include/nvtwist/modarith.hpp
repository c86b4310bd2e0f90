#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace nvtwist {

using Complex = std::complex<double>;

/// Largest modulus accepted by PrimeModulus (exclusive).
inline constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 31;

/// Deterministic Miller-Rabin, exact for every n < 2^64.
bool is_prime(std::uint64_t n);

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);
std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

/// Prime factorization by trial division, primes ascending.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);
/// All positive divisors, ascending.
std::vector<std::uint64_t> divisors(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);
int mobius(std::uint64_t n);
/// Number of positive divisors.
std::uint64_t divisor_count(std::uint64_t n);

/// Smallest primitive root of the prime q (q >= 3).
std::uint64_t primitive_root(std::uint64_t q);

/// The cyclic group (Z/qZ)* for a prime q, with its canonical generator and
/// a full discrete-log table. Immutable after construction.
class PrimeModulus {
 public:
  explicit PrimeModulus(std::uint64_t q);

  static std::shared_ptr<const PrimeModulus> make(std::uint64_t q) {
    return std::make_shared<const PrimeModulus>(q);
  }

  std::uint32_t q() const noexcept { return q_; }
  std::uint32_t generator() const noexcept { return g_; }
  std::uint32_t group_order() const noexcept { return q_ - 1; }
  /// Distinct primes dividing q - 1.
  const std::vector<std::uint32_t>& group_order_primes() const noexcept {
    return order_primes_;
  }

  /// n mod q in [0, q).
  std::uint32_t reduce(std::int64_t n) const noexcept;

  /// k in [0, q-2] with g^k = r. Throws PreconditionError if q | r.
  std::uint32_t discrete_log(std::int64_t r) const;
  /// g^k mod q for any k (reduced mod q-1).
  std::uint32_t generator_power(std::uint64_t k) const noexcept {
    return powers_[k % (q_ - 1)];
  }
  /// Least t >= 1 with n^t = 1. Throws PreconditionError if q | n.
  std::uint64_t mul_order(std::int64_t n) const;
  /// Inverse of n mod q. Throws PreconditionError if q | n.
  std::uint32_t inv_mod(std::int64_t n) const;

  /// e^{2 pi i k / q}.
  Complex additive_root(std::int64_t k) const noexcept {
    return additive_[reduce(k)];
  }
  /// cos(2 pi k / q).
  double additive_cos(std::int64_t k) const noexcept {
    return additive_[reduce(k)].real();
  }
  /// e^{2 pi i k / (q-1)}.
  Complex unit_root(std::uint64_t k) const noexcept {
    return unit_[k % (q_ - 1)];
  }

 private:
  std::uint32_t q_;
  std::uint32_t g_;
  std::vector<std::uint32_t> order_primes_;
  std::vector<std::uint32_t> dlog_;    // dlog_[r], r in 1..q-1
  std::vector<std::uint32_t> powers_;  // g^k, k in 0..q-2
  std::vector<Complex> additive_;
  std::vector<Complex> unit_;
};

}  // namespace nvtwist
