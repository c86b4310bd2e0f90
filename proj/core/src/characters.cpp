#include "nvtwist/characters.hpp"

#include <string>

#include "nvtwist/errors.hpp"
#include "nvtwist/kloosterman.hpp"

namespace nvtwist {

namespace {

void require_proper_divisor(const PrimeModulus& modulus, std::uint64_t d) {
  const std::uint64_t order = modulus.group_order();
  if (d == 0 || order % d != 0) {
    throw PreconditionError("d=" + std::to_string(d) + " does not divide q-1=" +
                            std::to_string(order));
  }
  if (d == order) {
    throw PreconditionError("d=q-1 gives the trivial character");
  }
}

}  // namespace

DirichletCharacter::DirichletCharacter(std::shared_ptr<const PrimeModulus> modulus,
                                       std::uint64_t index)
    : modulus_(std::move(modulus)),
      index_(static_cast<std::uint32_t>(index % modulus_->group_order())) {}

std::uint64_t DirichletCharacter::order() const noexcept {
  return modulus_->group_order() / d();
}

std::uint64_t DirichletCharacter::d() const noexcept {
  return gcd(index_, modulus_->group_order());
}

Complex DirichletCharacter::operator()(std::int64_t n) const {
  const std::uint32_t r = modulus_->reduce(n);
  if (r == 0) return {0.0, 0.0};
  const std::uint64_t k = modulus_->discrete_log(r);
  return modulus_->unit_root(static_cast<std::uint64_t>(index_) * k);
}

DirichletCharacter DirichletCharacter::pow(std::uint64_t j) const {
  const std::uint64_t m = modulus_->group_order();
  return DirichletCharacter(modulus_, static_cast<std::uint64_t>(index_) * (j % m) % m);
}

GaloisOrbit galois_orbit(const DirichletCharacter& chi) {
  if (chi.is_trivial()) throw PreconditionError("galois_orbit: trivial character");
  GaloisOrbit orbit{chi, {}};
  const std::uint64_t m = chi.order();
  for (std::uint64_t j = 1; j < m; ++j) {
    if (gcd(j, m) == 1) orbit.members.push_back(chi.pow(j));
  }
  return orbit;
}

DirichletCharacter character_with_d(std::shared_ptr<const PrimeModulus> modulus,
                                    std::uint64_t d) {
  require_proper_divisor(*modulus, d);
  return DirichletCharacter(std::move(modulus), d);
}

Rational chi_av_formula(std::int64_t n, const PrimeModulus& modulus, std::uint64_t d) {
  require_proper_divisor(modulus, d);
  if (modulus.reduce(n) == 0) {
    throw PreconditionError("chi_av_formula: q divides n");
  }
  const std::uint32_t nd = static_cast<std::uint32_t>(pow_mod(modulus.reduce(n), d, modulus.q()));
  const std::uint64_t ord = modulus.mul_order(nd);
  return make_rational(mobius(ord), static_cast<long long>(euler_phi(ord)));
}

Rational chi_av_or_zero(std::int64_t n, const PrimeModulus& modulus, std::uint64_t d) {
  if (modulus.reduce(n) == 0) return Rational(0);
  return chi_av_formula(n, modulus, d);
}

Complex chi_av_bruteforce(const GaloisOrbit& orbit, std::int64_t n) {
  Complex sum{0.0, 0.0};
  for (const auto& member : orbit.members) sum += member(n);
  return sum / static_cast<double>(orbit.size());
}

Complex gauss_sum(const DirichletCharacter& chi) {
  const PrimeModulus& m = chi.modulus();
  Complex sum{0.0, 0.0};
  for (std::uint32_t x = 1; x < m.q(); ++x) sum += chi(x) * m.additive_root(x);
  return sum;
}

Complex root_number(const EllipticCurveForm& form, const DirichletCharacter& chi) {
  const PrimeModulus& m = chi.modulus();
  if (form.conductor() % m.q() == 0) {
    throw PreconditionError("root_number: q=" + std::to_string(m.q()) +
                            " divides the conductor of " + form.label());
  }
  const Complex tau = gauss_sum(chi);
  return static_cast<double>(form.epsilon()) *
         chi(static_cast<std::int64_t>(form.conductor() % m.q())) * tau * tau /
         static_cast<double>(m.q());
}

Complex tilde_chi_av_direct(const EllipticCurveForm& form, const GaloisOrbit& orbit,
                            std::int64_t n) {
  Complex sum{0.0, 0.0};
  for (const auto& member : orbit.members) {
    sum += root_number(form, member) * std::conj(member(n));
  }
  return sum / static_cast<double>(orbit.size());
}

double tilde_chi_av_kloosterman(const EllipticCurveForm& form, const KloostermanTable& table,
                                std::uint64_t d, std::int64_t n) {
  const PrimeModulus& m = table.modulus();
  require_proper_divisor(m, d);
  const std::uint32_t conductor = m.reduce(static_cast<std::int64_t>(form.conductor() % m.q()));
  if (m.reduce(n) == 0 || conductor == 0) {
    throw PreconditionError("tilde_chi_av_kloosterman: q divides nN");
  }
  double sum = 0.0;
  for (std::uint32_t r = 1; r < m.q(); ++r) {
    const double weight =
        to_double(chi_av_formula(static_cast<std::int64_t>(r) * conductor, m, d));
    sum += weight * table(r, n);
  }
  return form.epsilon() * sum / m.q();
}

ChiAvL1 chi_av_l1(const PrimeModulus& modulus, std::uint64_t d) {
  require_proper_divisor(modulus, d);
  ChiAvL1 out;
  out.l1 = 0;
  for (std::uint32_t r = 1; r < modulus.q(); ++r) out.l1 += abs(chi_av_formula(r, modulus, d));
  out.phi_d = euler_phi(d);
  out.over_phi_d = out.l1 / Rational(out.phi_d);
  out.over_d = out.l1 / Rational(d);
  return out;
}

}  // namespace nvtwist
