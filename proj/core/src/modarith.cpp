#include "nvtwist/modarith.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "nvtwist/errors.hpp"

namespace nvtwist {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

bool miller_rabin_witness(std::uint64_t n, std::uint64_t a, std::uint64_t d, int s) {
  std::uint64_t x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int i = 1; i < s; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  if (mod == 1) return 0;
  std::uint64_t result = 1;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, mod);
    base = mul_mod(base, base, mod);
    exp >>= 1;
  }
  return result;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These twelve bases are sufficient for all n < 3.3 * 10^24.
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out{1};
  for (auto [p, e] : factorize(n)) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (int i = 0; i < e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

int mobius(std::uint64_t n) {
  int mu = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

std::uint64_t divisor_count(std::uint64_t n) {
  std::uint64_t count = 1;
  for (auto [p, e] : factorize(n)) count *= static_cast<std::uint64_t>(e + 1);
  return count;
}

std::uint64_t primitive_root(std::uint64_t q) {
  if (q < 3 || !is_prime(q)) {
    throw PreconditionError("primitive_root: " + std::to_string(q) +
                            " is not an odd prime");
  }
  const auto factors = factorize(q - 1);
  for (std::uint64_t g = 2; g < q; ++g) {
    bool generates = true;
    for (auto [p, e] : factors) {
      if (pow_mod(g, (q - 1) / p, q) == 1) {
        generates = false;
        break;
      }
    }
    if (generates) return g;
  }
  throw std::logic_error("primitive_root: no generator found");  // unreachable for prime q
}

PrimeModulus::PrimeModulus(std::uint64_t q) {
  if (q < 3 || q >= kMaxModulus || !is_prime(q)) {
    throw PreconditionError("modulus must be a prime in [3, 2^31): got " +
                            std::to_string(q));
  }
  q_ = static_cast<std::uint32_t>(q);
  g_ = static_cast<std::uint32_t>(primitive_root(q));
  for (auto [p, e] : factorize(q - 1)) order_primes_.push_back(static_cast<std::uint32_t>(p));

  dlog_.assign(q_, 0);
  powers_.assign(q_ - 1, 0);
  std::uint64_t x = 1;
  for (std::uint32_t k = 0; k + 1 < q_; ++k) {
    powers_[k] = static_cast<std::uint32_t>(x);
    dlog_[x] = k;
    x = x * g_ % q_;
  }

  additive_.resize(q_);
  for (std::uint32_t k = 0; k < q_; ++k) {
    additive_[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / q_);
  }
  unit_.resize(q_ - 1);
  for (std::uint32_t k = 0; k + 1 < q_; ++k) {
    unit_[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / (q_ - 1));
  }
}

std::uint32_t PrimeModulus::reduce(std::int64_t n) const noexcept {
  const std::int64_t r = n % static_cast<std::int64_t>(q_);
  return static_cast<std::uint32_t>(r < 0 ? r + q_ : r);
}

std::uint32_t PrimeModulus::discrete_log(std::int64_t r) const {
  const std::uint32_t x = reduce(r);
  if (x == 0) {
    throw PreconditionError("discrete_log: residue divisible by q=" + std::to_string(q_));
  }
  return dlog_[x];
}

std::uint64_t PrimeModulus::mul_order(std::int64_t n) const {
  const std::uint32_t x = reduce(n);
  if (x == 0) {
    throw PreconditionError("mul_order: residue divisible by q=" + std::to_string(q_));
  }
  return (q_ - 1) / gcd(dlog_[x], q_ - 1);
}

std::uint32_t PrimeModulus::inv_mod(std::int64_t n) const {
  const std::uint32_t x = reduce(n);
  if (x == 0) {
    throw PreconditionError("inv_mod: residue divisible by q=" + std::to_string(q_));
  }
  return powers_[(q_ - 1 - dlog_[x]) % (q_ - 1)];
}

}  // namespace nvtwist
