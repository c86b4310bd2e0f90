#include "nvtwist/lfunctions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <limits>
#include <mutex>
#include <thread>

#include "nvtwist/errors.hpp"
#include "nvtwist/kloosterman.hpp"

namespace nvtwist {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double q_power(std::uint64_t q, const Rational& e) {
  return std::pow(static_cast<double>(q), to_double(e));
}

void require_coprime(const EllipticCurveForm& form, std::uint64_t q) {
  if (form.conductor() % q == 0) {
    throw PreconditionError("q=" + std::to_string(q) + " divides the conductor of " +
                            form.label());
  }
}

// Weights of the mollified AFE for one (curve, q, parameters), folded by
// residue class so each character costs O(q X).
struct AfeContext {
  std::shared_ptr<const PrimeModulus> modulus;
  double sqrt_level = 0.0;
  double x_len = 0.0;
  double y_bal = 0.0;
  std::uint64_t x_max = 0;
  std::vector<double> c;
  std::vector<double> tail_folded;
  std::vector<std::vector<double>> dual_folded;  // [m][r]

  AfeContext(const EllipticCurveForm& form, std::shared_ptr<const PrimeModulus> mod,
             const AfeParameters& params)
      : modulus(std::move(mod)) {
    params.validate();
    const std::uint64_t q = modulus->q();
    require_coprime(form, q);
    const double qd = static_cast<double>(q);
    sqrt_level = std::sqrt(static_cast<double>(form.conductor()));
    x_len = params.mollifier_length(q);
    y_bal = params.balance(q);
    x_max = static_cast<std::uint64_t>(std::floor(x_len));
    c = mollifier_coeffs(form, x_len);

    const double tail_scale = qd * y_bal * sqrt_level / kTwoPi;
    const std::uint64_t n_tail =
        std::max(x_max, exp_cutoff(tail_scale, params.tail_tolerance, params.truncation_factor));
    const std::uint64_t n_dual = exp_cutoff(static_cast<double>(x_max) * qd * sqrt_level / (kTwoPi * y_bal),
                                            params.tail_tolerance, params.truncation_factor);
    const auto lam = form.lambda_table(std::max(n_tail, n_dual));
    const auto a = dirichlet_convolve(*lam, c, n_tail);

    tail_folded.assign(q, 0.0);
    for (std::uint64_t n = x_max + 1; n <= n_tail; ++n) {
      if (a[n] == 0.0) continue;
      tail_folded[n % q] += a[n] / std::sqrt(static_cast<double>(n)) * std::exp(-static_cast<double>(n) / tail_scale);
    }

    dual_folded.assign(x_max + 1, {});
    for (std::uint64_t m = 1; m <= x_max; ++m) {
      if (c[m] == 0.0) continue;
      const double scale = static_cast<double>(m) * qd * sqrt_level / (kTwoPi * y_bal);
      const std::uint64_t n_m = exp_cutoff(scale, params.tail_tolerance, params.truncation_factor);
      auto& row = dual_folded[m];
      row.assign(q, 0.0);
      for (std::uint64_t n = 1; n <= n_m; ++n) {
        row[n % q] += (*lam)[n] / std::sqrt(static_cast<double>(n)) * std::exp(-static_cast<double>(n) / scale);
      }
    }
  }

  MollifiedAfe evaluate(const EllipticCurveForm& form, const DirichletCharacter& chi) const {
    const std::uint32_t q = modulus->q();
    MollifiedAfe out{{0.0, 0.0}, {0.0, 0.0}};
    for (std::uint32_t r = 1; r < q; ++r) out.tail += tail_folded[r] * chi(r);
    Complex dual{0.0, 0.0};
    for (std::uint64_t m = 1; m <= x_max; ++m) {
      if (c[m] == 0.0) continue;
      Complex inner{0.0, 0.0};
      for (std::uint32_t r = 1; r < q; ++r) inner += dual_folded[m][r] * std::conj(chi(r));
      dual += c[m] * chi(static_cast<std::int64_t>(m)) / std::sqrt(static_cast<double>(m)) * inner;
    }
    out.dual = root_number(form, chi) * dual;
    return out;
  }
};

void require_same_modulus(const GaloisOrbit& orbit) {
  if (orbit.members.empty()) throw PreconditionError("empty Galois orbit");
}

// The two sums A (chi) and B (conj chi, without the root number) of the
// unbalanced functional equation.
std::pair<Complex, Complex> afe_halves(const EllipticCurveForm& form, const DirichletCharacter& chi,
                                       double y_balance, double tail_tolerance,
                                       double truncation_factor) {
  const PrimeModulus& m = chi.modulus();
  require_coprime(form, m.q());
  if (chi.is_trivial()) throw PreconditionError("central value needs a primitive character");
  if (!(y_balance > 0.0)) throw PreconditionError("balance parameter must be positive");
  const double base = static_cast<double>(m.q()) * std::sqrt(static_cast<double>(form.conductor())) / kTwoPi;
  const double scale_a = base * y_balance;
  const double scale_b = base / y_balance;
  const std::uint64_t n_a = exp_cutoff(scale_a, tail_tolerance, truncation_factor);
  const std::uint64_t n_b = exp_cutoff(scale_b, tail_tolerance, truncation_factor);
  const auto lam = form.lambda_table(std::max(n_a, n_b));
  Complex first{0.0, 0.0}, second{0.0, 0.0};
  for (std::uint64_t n = 1; n <= n_a; ++n) {
    const double nd = static_cast<double>(n);
    first += (*lam)[n] / std::sqrt(nd) * std::exp(-nd / scale_a) * chi(static_cast<std::int64_t>(n));
  }
  for (std::uint64_t n = 1; n <= n_b; ++n) {
    const double nd = static_cast<double>(n);
    second += (*lam)[n] / std::sqrt(nd) * std::exp(-nd / scale_b) * std::conj(chi(static_cast<std::int64_t>(n)));
  }
  return {first, second};
}

}  // namespace

void AfeParameters::validate() const {
  if (!(b > 0 && b < a && a < 1)) throw PreconditionError("parameters need 0 < b < a < 1");
  if (!(a + 1 <= c && c <= 2)) throw PreconditionError("parameters need a + 1 <= c <= 2");
  if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0)) {
    throw PreconditionError("tail_tolerance must lie in (0, 1)");
  }
  if (!(truncation_factor > 0.0)) throw PreconditionError("truncation_factor must be positive");
}

void AfeParameters::validate_for_s2() const {
  validate();
  if (!(2 * b < a)) throw PreconditionError("S2 needs 2b < a");
}

double AfeParameters::mollifier_length(std::uint64_t q) const { return q_power(q, b); }
double AfeParameters::balance(std::uint64_t q) const { return q_power(q, a); }

std::uint64_t exp_cutoff(double scale, double tolerance, double truncation_factor) {
  const double length =
      truncation_factor * scale * (std::log(1.0 / tolerance) + std::log1p(scale) + 6.0);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(length)));
}

MollifiedAfe mollified_afe_parts(const EllipticCurveForm& form, const DirichletCharacter& chi,
                                 const AfeParameters& params) {
  if (chi.is_trivial()) throw PreconditionError("mollified_afe needs a primitive character");
  AfeContext ctx(form, chi.modulus_ptr(), params);
  return ctx.evaluate(form, chi);
}

Complex mollified_afe(const EllipticCurveForm& form, const DirichletCharacter& chi,
                      const AfeParameters& params) {
  return mollified_afe_parts(form, chi, params).value();
}

Complex unbalanced_lvalue(const EllipticCurveForm& form, const DirichletCharacter& chi,
                          double y_balance, double tail_tolerance, double truncation_factor) {
  auto [first, second] = afe_halves(form, chi, y_balance, tail_tolerance, truncation_factor);
  return first + root_number(form, chi) * second;
}

Complex direct_lvalue(const EllipticCurveForm& form, const DirichletCharacter& chi,
                      double tail_tolerance, double truncation_factor) {
  return unbalanced_lvalue(form, chi, 1.0, tail_tolerance, truncation_factor);
}

Complex mollifier_value(const EllipticCurveForm& form, const DirichletCharacter& chi,
                        double x_len) {
  if (x_len < 2.0) return {1.0, 0.0};
  const auto c = mollifier_coeffs(form, x_len);
  Complex sum{0.0, 0.0};
  for (std::uint64_t n = 1; n < c.size(); ++n) {
    sum += c[n] * chi(static_cast<std::int64_t>(n)) / std::sqrt(static_cast<double>(n));
  }
  return sum;
}

EpsilonCheck check_epsilon(const EllipticCurveForm& form, const DirichletCharacter& chi,
                           double y1, double y2, double tail_tolerance) {
  auto [a1, b1] = afe_halves(form, chi, y1, tail_tolerance, 1.0);
  auto [a2, b2] = afe_halves(form, chi, y2, tail_tolerance, 1.0);
  const Complex eps = root_number(form, chi);
  EpsilonCheck out;
  out.configured_gap = std::abs((a1 + eps * b1) - (a2 + eps * b2));
  out.flipped_gap = std::abs((a1 - eps * b1) - (a2 - eps * b2));
  return out;
}

Complex compute_S1(const EllipticCurveForm& form, const GaloisOrbit& orbit,
                   const AfeParameters& params) {
  require_same_modulus(orbit);
  const PrimeModulus& m = orbit.base.modulus();
  AfeContext ctx(form, orbit.base.modulus_ptr(), params);
  const std::uint64_t d = orbit.d();
  double sum = 0.0;
  for (std::uint32_t r = 1; r < m.q(); ++r) {
    sum += ctx.tail_folded[r] * to_double(chi_av_formula(r, m, d));
  }
  return {sum, 0.0};
}

S2Values compute_S2(const EllipticCurveForm& form, const GaloisOrbit& orbit,
                    const AfeParameters& params) {
  require_same_modulus(orbit);
  params.validate_for_s2();
  const auto& mod_ptr = orbit.base.modulus_ptr();
  const PrimeModulus& m = *mod_ptr;
  const std::uint32_t q = m.q();
  require_coprime(form, q);
  const std::uint64_t d = orbit.d();

  const double qd = q;
  const double sqrt_level = std::sqrt(static_cast<double>(form.conductor()));
  const double x_len = params.mollifier_length(q);
  const double y_bal = params.balance(q);
  S2Values out{{0.0, 0.0}, {0.0, 0.0}};
  if (x_len < 1.0) return out;
  const auto x_max = static_cast<std::uint64_t>(std::floor(x_len));
  const auto c = mollifier_coeffs(form, x_len);
  // n <= q^{1+eps} X / Y, with q^eps realized by the logarithmic cutoff.
  const std::uint64_t n_max = exp_cutoff(static_cast<double>(x_max) * qd * sqrt_level / (kTwoPi * y_bal),
                                         params.tail_tolerance, params.truncation_factor);
  const auto lam = form.lambda_table(n_max);

  std::vector<Complex> tilde(q, {0.0, 0.0});
  for (std::uint32_t r = 1; r < q; ++r) tilde[r] = tilde_chi_av_direct(form, orbit, r);

  KloostermanTable kl(mod_ptr);
  std::vector<double> chi_av_rn(q, 0.0);
  const auto n_level = static_cast<std::int64_t>(form.conductor() % q);
  for (std::uint32_t r = 1; r < q; ++r) {
    chi_av_rn[r] = to_double(chi_av_formula(static_cast<std::int64_t>(r) * n_level, m, d));
  }

  Complex direct{0.0, 0.0};
  double via_kloosterman = 0.0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    if (n % q == 0 || (*lam)[n] == 0.0) continue;
    for (std::uint64_t mm = 1; mm <= x_max; ++mm) {
      if (c[mm] == 0.0) continue;
      const double nd = static_cast<double>(n), md = static_cast<double>(mm);
      const double weight = (*lam)[n] * c[mm] / std::sqrt(nd * md) *
                            std::exp(-kTwoPi * nd * y_bal / (md * qd * sqrt_level));
      const std::uint32_t h =
          static_cast<std::uint32_t>(static_cast<std::uint64_t>(m.reduce(static_cast<std::int64_t>(n))) *
                                     m.inv_mod(static_cast<std::int64_t>(mm)) % q);
      direct += weight * tilde[h];
      double inner = 0.0;
      for (std::uint32_t r = 1; r < q; ++r) inner += chi_av_rn[r] * kl(r, h);
      via_kloosterman += weight * inner;
    }
  }
  out.direct = direct;
  out.kloosterman = {form.epsilon() * via_kloosterman / qd, 0.0};
  return out;
}

double s1_envelope(std::uint64_t q, double gamma, const AfeParameters& params) {
  const double qd = static_cast<double>(q);
  return std::max(std::pow(qd, gamma - to_double(params.b) / 2.0),
                  std::pow(qd, gamma + to_double(params.c) / 2.0 - 1.0));
}

double s2_envelope(std::uint64_t q, double gamma, const AfeParameters& params) {
  const double qd = static_cast<double>(q);
  const double base = 0.75 * to_double(params.b) - 0.375 * to_double(params.a);
  return std::pow(qd, base - 1.0 / 16.0 + gamma) + std::pow(qd, base + gamma / 2.0);
}

MomentReport orbit_average_moment(const EllipticCurveForm& form, const GaloisOrbit& orbit,
                                  const AfeParameters& params) {
  require_same_modulus(orbit);
  params.validate_for_s2();
  const PrimeModulus& m = orbit.base.modulus();
  AfeContext ctx(form, orbit.base.modulus_ptr(), params);

  MomentReport report;
  report.curve = form.label();
  report.q = m.q();
  report.d = orbit.d();
  report.gamma = std::log(static_cast<double>(report.d)) / std::log(static_cast<double>(report.q));
  report.orbit_size = orbit.size();
  report.min_abs_L = std::numeric_limits<double>::infinity();
  report.min_abs_LM = std::numeric_limits<double>::infinity();

  Complex sum_lm{0.0, 0.0}, sum_afe{0.0, 0.0};
  for (const auto& member : orbit.members) {
    MemberValue value;
    value.index = member.index();
    value.lvalue = direct_lvalue(form, member, params.tail_tolerance, params.truncation_factor);
    value.mollifier = mollifier_value(form, member, ctx.x_len);
    value.afe = ctx.evaluate(form, member).value();
    const Complex lm = value.lvalue * value.mollifier;
    sum_lm += lm;
    sum_afe += value.afe;
    report.min_abs_L = std::min(report.min_abs_L, std::abs(value.lvalue));
    report.min_abs_LM = std::min(report.min_abs_LM, std::abs(lm));
    if (std::abs(value.lvalue) < kVanishingThreshold) ++report.vanishing_count;
    report.members.push_back(value);
  }
  const double g = static_cast<double>(orbit.size());
  report.average = sum_lm / g;
  report.afe_average = sum_afe / g;
  report.s1 = compute_S1(form, orbit, params);
  const S2Values s2 = compute_S2(form, orbit, params);
  report.s2 = s2.direct;
  report.s2_kloosterman = s2.kloosterman;
  report.residual = report.average - 1.0 - report.s1 - report.s2;
  report.s1_envelope = s1_envelope(report.q, report.gamma, params);
  report.s2_envelope = s2_envelope(report.q, report.gamma, params);
  return report;
}

std::vector<ScanRecord> nonvanishing_scan(const EllipticCurveForm& form,
                                          const std::vector<std::uint64_t>& q_list,
                                          std::uint64_t order_floor,
                                          const AfeParameters& params, unsigned threads) {
  struct Job {
    std::size_t slot;
    std::shared_ptr<const PrimeModulus> modulus;
    std::uint64_t d;
  };
  std::vector<ScanRecord> rows;
  std::vector<Job> jobs;
  std::vector<std::uint64_t> sorted(q_list);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  for (std::uint64_t q : sorted) {
    if (q < 3 || !is_prime(q)) throw PreconditionError("scan: q=" + std::to_string(q) + " is not an odd prime");
    if (form.conductor() % q == 0) {
      ScanRecord skip;
      skip.q = static_cast<std::uint32_t>(q);
      skip.warning = "q divides the conductor of " + form.label() + "; skipped";
      rows.push_back(std::move(skip));
      continue;
    }
    auto modulus = PrimeModulus::make(q);
    for (std::uint64_t d : divisors(q - 1)) {
      const std::uint64_t order = (q - 1) / d;
      if (order < 2 || order < order_floor) continue;
      ScanRecord row;
      row.q = static_cast<std::uint32_t>(q);
      rows.push_back(std::move(row));
      jobs.push_back({rows.size() - 1, modulus, d});
    }
  }

  auto run = [&](const Job& job) {
    const GaloisOrbit orbit = galois_orbit(character_with_d(job.modulus, job.d));
    rows[job.slot].report = orbit_average_moment(form, orbit, params);
  };

  if (threads <= 1 || jobs.size() <= 1) {
    for (const auto& job : jobs) run(job);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, jobs.size()); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          run(jobs[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace nvtwist
