#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "nvtwist/hecke.hpp"
#include "nvtwist/modarith.hpp"
#include "nvtwist/rational.hpp"

namespace nvtwist {

class KloostermanTable;

/// Dirichlet character mod a prime q, chi(g^k) = e^{2 pi i t k / (q-1)} for
/// the canonical generator g and index t in [0, q-2].
class DirichletCharacter {
 public:
  DirichletCharacter(std::shared_ptr<const PrimeModulus> modulus, std::uint64_t index);

  const PrimeModulus& modulus() const noexcept { return *modulus_; }
  const std::shared_ptr<const PrimeModulus>& modulus_ptr() const noexcept { return modulus_; }
  std::uint32_t index() const noexcept { return index_; }

  /// (q-1) / gcd(t, q-1).
  std::uint64_t order() const noexcept;
  /// d = gcd(t, q-1), so that order = (q-1)/d. Equals q-1 for the trivial character.
  std::uint64_t d() const noexcept;
  bool is_trivial() const noexcept { return index_ == 0; }
  /// For prime q every non-trivial character is primitive.
  bool is_primitive() const noexcept { return index_ != 0; }

  Complex operator()(std::int64_t n) const;

  DirichletCharacter pow(std::uint64_t j) const;
  DirichletCharacter conj() const { return pow(modulus_->group_order() - 1); }

  bool operator==(const DirichletCharacter& other) const noexcept {
    return modulus_->q() == other.modulus_->q() && index_ == other.index_;
  }

 private:
  std::shared_ptr<const PrimeModulus> modulus_;
  std::uint32_t index_;
};

/// Conjugates chi^j, gcd(j, ord chi) = 1, listed by increasing j.
struct GaloisOrbit {
  DirichletCharacter base;
  std::vector<DirichletCharacter> members;

  std::size_t size() const noexcept { return members.size(); }
  std::uint64_t order() const noexcept { return base.order(); }
  std::uint64_t d() const noexcept { return base.d(); }
};

GaloisOrbit galois_orbit(const DirichletCharacter& chi);

/// The canonical character of order (q-1)/d, index t = d.
DirichletCharacter character_with_d(std::shared_ptr<const PrimeModulus> modulus, std::uint64_t d);

/// mu(ord(n^d)) / phi(ord(n^d)), the closed form of the orbit average.
/// Requires q not dividing n and d a proper divisor of q-1.
Rational chi_av_formula(std::int64_t n, const PrimeModulus& modulus, std::uint64_t d);

/// chi_av extended by 0 at multiples of q.
Rational chi_av_or_zero(std::int64_t n, const PrimeModulus& modulus, std::uint64_t d);

/// Arithmetic mean of member(n) over the orbit.
Complex chi_av_bruteforce(const GaloisOrbit& orbit, std::int64_t n);

/// sum_{x=1}^{q-1} chi(x) e^{2 pi i x / q}.
Complex gauss_sum(const DirichletCharacter& chi);

/// epsilon(f) chi(N) tau(chi)^2 / q.
Complex root_number(const EllipticCurveForm& form, const DirichletCharacter& chi);

/// (1/|G|) sum_sigma epsilon(f x chi^sigma) conj(chi^sigma(n)).
Complex tilde_chi_av_direct(const EllipticCurveForm& form, const GaloisOrbit& orbit,
                            std::int64_t n);

/// (epsilon(f)/q) sum_{r mod q} chi_av(rN) S(r, n, q), with chi_av(0) = 0.
double tilde_chi_av_kloosterman(const EllipticCurveForm& form, const KloostermanTable& table,
                                std::uint64_t d, std::int64_t n);

struct ChiAvL1 {
  Rational l1;           ///< sum_{r=1}^{q-1} |chi_av(r)|
  std::uint64_t phi_d;   ///< phi(d), the proven lower bound
  Rational over_phi_d;   ///< l1 / phi(d)
  Rational over_d;       ///< l1 / d
  bool lower_bound_holds() const { return l1 >= Rational(phi_d); }
};

ChiAvL1 chi_av_l1(const PrimeModulus& modulus, std::uint64_t d);

}  // namespace nvtwist
