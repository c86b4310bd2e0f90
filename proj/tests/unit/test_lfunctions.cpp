#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nvtwist/curve_io.hpp"
#include "nvtwist/errors.hpp"
#include "nvtwist/lfunctions.hpp"
#include "oracles.hpp"

namespace nvtwist {
namespace {

const std::vector<EllipticCurveForm>& curves() {
  static const auto table = load_curve_file(NVTWIST_TEST_CURVES);
  return table;
}

const EllipticCurveForm& curve(std::string_view label) { return find_curve(curves(), label); }

/// 1 + tail + dual summed term by term, no residue folding; generous cutoffs.
Complex naive_mollified_afe(const EllipticCurveForm& e, const DirichletCharacter& chi,
                            const AfeParameters& params) {
  const double two_pi = 2.0 * std::numbers::pi;
  const std::uint64_t q = chi.modulus().q();
  const double qd = static_cast<double>(q);
  const double root_n = std::sqrt(static_cast<double>(e.conductor()));
  const double x = std::pow(qd, to_double(params.b));
  const double y = std::pow(qd, to_double(params.a));
  const auto x_max = static_cast<std::uint64_t>(x);
  const auto c = mollifier_coeffs(e, x);

  const double tail_scale = qd * y * root_n / two_pi;
  const auto n_tail = static_cast<std::uint64_t>(40.0 * tail_scale) + 10;
  const auto lam = e.lambda_table(n_tail);
  Complex tail = 0.0;
  for (std::uint64_t n = x_max + 1; n <= n_tail; ++n) {
    const double a_n = oracle::convolve_at(*lam, c, n);
    tail += a_n * chi(static_cast<std::int64_t>(n)) / std::sqrt(static_cast<double>(n)) *
            std::exp(-static_cast<double>(n) / tail_scale);
  }
  Complex dual = 0.0;
  for (std::uint64_t m = 1; m <= x_max; ++m) {
    const double scale = static_cast<double>(m) * qd * root_n / (two_pi * y);
    const auto n_m = static_cast<std::uint64_t>(40.0 * scale) + 10;
    Complex inner = 0.0;
    for (std::uint64_t n = 1; n <= n_m; ++n) {
      inner += (*lam)[n] * std::conj(chi(static_cast<std::int64_t>(n))) /
               std::sqrt(static_cast<double>(n)) * std::exp(-static_cast<double>(n) / scale);
    }
    dual += c[m] * chi(static_cast<std::int64_t>(m)) / std::sqrt(static_cast<double>(m)) * inner;
  }
  return 1.0 + tail + root_number(e, chi) * dual;
}

TEST(AfeParameters, DefaultsAndValidation) {
  AfeParameters p;
  EXPECT_EQ(p.b, make_rational(7, 26));
  EXPECT_EQ(p.a, make_rational(19, 26));
  EXPECT_EQ(p.c, make_rational(45, 26));
  EXPECT_NO_THROW(p.validate_for_s2());
  EXPECT_NEAR(p.mollifier_length(13), std::pow(13.0, 7.0 / 26.0), 1e-12);

  AfeParameters bad = p;
  bad.b = make_rational(3, 4);
  EXPECT_THROW(bad.validate(), PreconditionError);
  bad = p;
  bad.c = make_rational(3, 2);
  EXPECT_THROW(bad.validate(), PreconditionError);
  bad = p;
  bad.tail_tolerance = 0.0;
  EXPECT_THROW(bad.validate(), PreconditionError);
  bad = p;
  bad.truncation_factor = -1.0;
  EXPECT_THROW(bad.validate(), PreconditionError);
  bad = p;
  bad.b = make_rational(2, 5);
  bad.a = make_rational(3, 5);
  EXPECT_NO_THROW(bad.validate());
  EXPECT_THROW(bad.validate_for_s2(), PreconditionError);
}

TEST(ExpCutoff, TailBelowTolerance) {
  for (double scale : {0.5, 3.0, 40.0, 900.0}) {
    const std::uint64_t n = exp_cutoff(scale, 1e-10, 1.0);
    // sum_{k > n} d(k) e^{-k/scale} is far below this crude geometric bound.
    const double tail = std::exp(-static_cast<double>(n) / scale) / (1.0 - std::exp(-1.0 / scale));
    EXPECT_LT(tail * std::log(static_cast<double>(n) + 2.0) * 10.0, 1e-10) << scale;
    EXPECT_GE(exp_cutoff(scale, 1e-10, 2.0), n);
  }
}

TEST(MollifierValue, ShortMollifierIsOne) {
  const DirichletCharacter chi(PrimeModulus::make(13), 1);
  EXPECT_EQ(mollifier_value(curve("32a"), chi, 1.5), Complex(1.0, 0.0));
  const Complex v = mollifier_value(curve("32a"), chi, 5.0);
  const auto c = mollifier_coeffs(curve("32a"), 5.0);
  Complex expected = 0.0;
  for (std::int64_t n = 1; n <= 5; ++n) expected += c[static_cast<std::size_t>(n)] * chi(n) / std::sqrt(double(n));
  EXPECT_NEAR(std::abs(v - expected), 0.0, 1e-14);
}

TEST(MollifiedAfe, MatchesNaiveSummation) {
  const AfeParameters params;
  for (const char* label : {"32a", "11a"}) {
    const auto m = PrimeModulus::make(13);
    for (std::uint64_t t : {1u, 5u, 6u}) {
      const DirichletCharacter chi(m, t);
      const Complex fast = mollified_afe(curve(label), chi, params);
      const Complex slow = naive_mollified_afe(curve(label), chi, params);
      EXPECT_NEAR(std::abs(fast - slow), 0.0, 1e-9) << label << " t=" << t;
    }
  }
}

TEST(MollifiedAfe, RejectsTrivialCharacterAndBadModulus) {
  const AfeParameters params;
  EXPECT_THROW(mollified_afe(curve("32a"), DirichletCharacter(PrimeModulus::make(13), 0), params),
               PreconditionError);
  EXPECT_THROW(mollified_afe(curve("11a"), DirichletCharacter(PrimeModulus::make(11), 1), params),
               PreconditionError);
  EXPECT_THROW(direct_lvalue(curve("37a"), DirichletCharacter(PrimeModulus::make(37), 1)),
               PreconditionError);
}

TEST(CentralValue, ConfiguredRootNumberIsTheConsistentOne) {
  for (const auto& e : curves()) {
    for (std::uint64_t q : {13u, 17u}) {
      const auto m = PrimeModulus::make(q);
      for (std::uint64_t t = 1; t + 1 < q; t += 3) {
        const auto check = check_epsilon(e, DirichletCharacter(m, t), 0.6, 1.9);
        EXPECT_LT(check.configured_gap, 1e-8) << e.label() << " q=" << q << " t=" << t;
        EXPECT_TRUE(check.consistent(1e-6)) << e.label() << " q=" << q << " t=" << t;
      }
    }
  }
}

TEST(CentralValue, IndependentOfBalance) {
  const DirichletCharacter chi(PrimeModulus::make(19), 4);
  const Complex base = direct_lvalue(curve("37a"), chi);
  for (double y : {0.3, 0.8, 2.5}) {
    EXPECT_NEAR(std::abs(unbalanced_lvalue(curve("37a"), chi, y) - base), 0.0, 1e-9);
  }
}

TEST(CentralValue, ConjugationSymmetry) {
  const AfeParameters params;
  const auto m = PrimeModulus::make(17);
  for (const auto& e : curves()) {
    for (std::uint64_t t : {1u, 3u, 4u}) {
      const DirichletCharacter chi(m, t);
      const double x = params.mollifier_length(17);
      EXPECT_NEAR(std::abs(direct_lvalue(e, chi.conj()) - std::conj(direct_lvalue(e, chi))), 0.0, 1e-9);
      EXPECT_NEAR(std::abs(mollifier_value(e, chi.conj(), x) - std::conj(mollifier_value(e, chi, x))),
                  0.0, 1e-9);
      EXPECT_NEAR(std::abs(mollified_afe(e, chi.conj(), params) - std::conj(mollified_afe(e, chi, params))),
                  0.0, 1e-9);
    }
  }
}

TEST(CentralValue, TruncationRobustness) {
  AfeParameters params;
  AfeParameters doubled = params;
  doubled.truncation_factor = 2.0;
  const DirichletCharacter chi(PrimeModulus::make(23), 2);
  for (const auto& e : curves()) {
    EXPECT_LT(std::abs(direct_lvalue(e, chi, 1e-10, 1.0) - direct_lvalue(e, chi, 1e-10, 2.0)), 1e-10);
    EXPECT_LT(std::abs(mollified_afe(e, chi, params) - mollified_afe(e, chi, doubled)), 1e-10);
    const auto orbit = galois_orbit(chi);
    EXPECT_LT(std::abs(compute_S1(e, orbit, params) - compute_S1(e, orbit, doubled)), 1e-10);
    EXPECT_LT(std::abs(compute_S2(e, orbit, params).direct - compute_S2(e, orbit, doubled).direct), 1e-10);
  }
}

TEST(CentralValue, QuadraticTwistsAreRealAndRootNumberMinusOneVanishes) {
  // For a real character the twisted root number is real; a sign of -1 forces
  // L(1/2) = 0.
  for (const auto& e : curves()) {
    for (std::uint64_t q : {13u, 17u, 19u, 23u, 29u}) {
      if (e.conductor() % q == 0) continue;
      const DirichletCharacter chi(PrimeModulus::make(q), (q - 1) / 2);
      const Complex w = root_number(e, chi);
      const Complex l = direct_lvalue(e, chi);
      EXPECT_NEAR(w.imag(), 0.0, 1e-12);
      EXPECT_NEAR(l.imag(), 0.0, 1e-10);
      if (w.real() < 0) EXPECT_NEAR(std::abs(l), 0.0, 1e-9) << e.label() << " q=" << q;
    }
  }
}

TEST(Moment, S2RoutesAgree) {
  const AfeParameters params;
  for (const auto& e : curves()) {
    for (std::uint64_t q : {13u, 19u}) {
      const auto m = PrimeModulus::make(q);
      for (std::uint64_t d : divisors(q - 1)) {
        if (d == q - 1) continue;
        const auto s2 = compute_S2(e, galois_orbit(character_with_d(m, d)), params);
        EXPECT_NEAR(std::abs(s2.direct - s2.kloosterman), 0.0, 1e-6) << e.label() << " q=" << q;
      }
    }
  }
}

TEST(Moment, AfeAverageDecomposesExactly) {
  const AfeParameters params;
  for (std::uint64_t q : {13u, 17u}) {
    const auto orbit = galois_orbit(character_with_d(PrimeModulus::make(q), 1));
    const auto report = orbit_average_moment(curve("32a"), orbit, params);
    EXPECT_NEAR(std::abs(report.afe_average - 1.0 - report.s1 - report.s2), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(report.residual - (report.average - 1.0 - report.s1 - report.s2)), 0.0, 1e-15);
    EXPECT_EQ(report.orbit_size, q == 13 ? 4u : 8u);
    EXPECT_EQ(report.members.size(), report.orbit_size);
    EXPECT_NEAR(report.gamma, 0.0, 1e-15);
    EXPECT_TRUE(report.average_nonzero());
  }
}

TEST(Moment, S1IsChiAvWeightedTail) {
  const AfeParameters params;
  const auto orbit = galois_orbit(character_with_d(PrimeModulus::make(13), 2));
  Complex mean_tail = 0.0;
  for (const auto& chi : orbit.members) mean_tail += mollified_afe_parts(curve("11a"), chi, params).tail;
  mean_tail /= static_cast<double>(orbit.size());
  EXPECT_NEAR(std::abs(compute_S1(curve("11a"), orbit, params) - mean_tail), 0.0, 1e-12);
}

TEST(Moment, ResidualShrinksWithQ) {
  const AfeParameters params;
  double previous = std::numeric_limits<double>::infinity();
  for (std::uint64_t q : {13u, 17u, 19u, 23u}) {
    const auto orbit = galois_orbit(character_with_d(PrimeModulus::make(q), 1));
    const double residual = orbit_average_moment(curve("32a"), orbit, params).residual_abs();
    EXPECT_LT(residual, previous) << q;
    previous = residual;
  }
}

TEST(Envelopes, Formulas) {
  const AfeParameters params;
  EXPECT_NEAR(s1_envelope(100, 0.1, params),
              std::max(std::pow(100.0, 0.1 - 7.0 / 52.0), std::pow(100.0, 0.1 + 45.0 / 52.0 - 1.0)),
              1e-12);
  const double base = 0.75 * 7.0 / 26.0 - 0.375 * 19.0 / 26.0;
  EXPECT_NEAR(s2_envelope(100, 0.1, params),
              std::pow(100.0, base - 1.0 / 16.0 + 0.1) + std::pow(100.0, base + 0.05), 1e-12);
}

TEST(Scan, DegenerateInputs) {
  const AfeParameters params;
  EXPECT_TRUE(nonvanishing_scan(curve("32a"), {}, 1, params).empty());
  EXPECT_TRUE(nonvanishing_scan(curve("32a"), {13}, 13, params).empty());
  EXPECT_THROW(nonvanishing_scan(curve("32a"), {15}, 1, params), PreconditionError);
  const auto skipped = nonvanishing_scan(curve("11a"), {11}, 1, params);
  ASSERT_EQ(skipped.size(), 1u);
  EXPECT_FALSE(skipped[0].report.has_value());
  EXPECT_FALSE(skipped[0].warning.empty());
}

TEST(Scan, OrderingAndThreadDeterminism) {
  const AfeParameters params;
  const auto serial = nonvanishing_scan(curve("37a"), {17, 13, 13}, 3, params, 1);
  const auto parallel = nonvanishing_scan(curve("37a"), {13, 17}, 3, params, 3);
  // q = 13: orders 3, 4, 6, 12; q = 17: orders 4, 8, 16.
  ASSERT_EQ(serial.size(), 7u);
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    ASSERT_TRUE(serial[i].report && parallel[i].report);
    EXPECT_EQ(serial[i].q, parallel[i].q);
    EXPECT_EQ(serial[i].report->d, parallel[i].report->d);
    EXPECT_EQ(serial[i].report->average, parallel[i].report->average);
    EXPECT_EQ(serial[i].report->s2, parallel[i].report->s2);
    if (i > 0 && serial[i].q == serial[i - 1].q) {
      EXPECT_GT(serial[i].report->d, serial[i - 1].report->d);
    }
  }
  EXPECT_EQ(serial.front().q, 13u);
  EXPECT_EQ(serial.back().q, 17u);
}

}  // namespace
}  // namespace nvtwist
