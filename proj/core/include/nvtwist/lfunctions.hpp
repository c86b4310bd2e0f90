#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvtwist/characters.hpp"
#include "nvtwist/hecke.hpp"
#include "nvtwist/rational.hpp"

namespace nvtwist {

/// Exponents of the mollifier length X = q^b, the unbalancing parameter
/// Y = q^a and the S1 split point q^c, plus truncation controls.
struct AfeParameters {
  Rational b = make_rational(7, 26);
  Rational a = make_rational(19, 26);
  Rational c = make_rational(45, 26);
  double tail_tolerance = 1e-10;
  double truncation_factor = 1.0;

  /// 0 < b < a < 1, a + 1 <= c <= 2, positive tolerance and factor.
  void validate() const;
  /// validate() plus 2b < a.
  void validate_for_s2() const;

  double mollifier_length(std::uint64_t q) const;  // X
  double balance(std::uint64_t q) const;           // Y
};

/// Last index kept by an exponentially weighted sum with weight e^{-n/scale}:
/// the discarded tail is below `tolerance` for coefficients of divisor size.
std::uint64_t exp_cutoff(double scale, double tolerance, double truncation_factor);

/// The two sums of the mollified approximate functional equation:
///   value = 1 + tail + dual.
struct MollifiedAfe {
  Complex tail;  ///< sum_{n > X} a_n chi(n) n^{-1/2} exp(-2 pi n / (q Y sqrt N))
  Complex dual;  ///< eps(f x chi) sum_n sum_{m <= X} ...
  Complex value() const { return 1.0 + tail + dual; }
};

MollifiedAfe mollified_afe_parts(const EllipticCurveForm& form, const DirichletCharacter& chi,
                                 const AfeParameters& params);
Complex mollified_afe(const EllipticCurveForm& form, const DirichletCharacter& chi,
                      const AfeParameters& params);

/// Central value from the exponentially weighted functional equation with
/// unbalancing Y (any Y > 0 gives the same value when epsilon(f) is right).
Complex unbalanced_lvalue(const EllipticCurveForm& form, const DirichletCharacter& chi,
                          double y_balance, double tail_tolerance = 1e-10,
                          double truncation_factor = 1.0);

/// L(f x chi, 1/2), balanced form (Y = 1).
Complex direct_lvalue(const EllipticCurveForm& form, const DirichletCharacter& chi,
                      double tail_tolerance = 1e-10, double truncation_factor = 1.0);

/// sum_{n <= X} c_n chi(n) / sqrt(n).
Complex mollifier_value(const EllipticCurveForm& form, const DirichletCharacter& chi,
                        double x_len);

/// Disagreement of the central value at two balance parameters, with the
/// configured epsilon(f) and with its negation.
struct EpsilonCheck {
  double configured_gap = 0.0;
  double flipped_gap = 0.0;
  bool consistent(double tolerance) const {
    return configured_gap < tolerance && flipped_gap > tolerance;
  }
};

EpsilonCheck check_epsilon(const EllipticCurveForm& form, const DirichletCharacter& chi,
                           double y1, double y2, double tail_tolerance = 1e-10);

Complex compute_S1(const EllipticCurveForm& form, const GaloisOrbit& orbit,
                   const AfeParameters& params);

struct S2Values {
  Complex direct;       ///< via the orbit average of root numbers
  Complex kloosterman;  ///< via the Kloosterman expansion of that average
};

S2Values compute_S2(const EllipticCurveForm& form, const GaloisOrbit& orbit,
                    const AfeParameters& params);

/// max(q^{gamma - b/2}, q^{gamma + c/2 - 1}).
double s1_envelope(std::uint64_t q, double gamma, const AfeParameters& params);
/// q^{3b/4 - 3a/8 - 1/16 + gamma} + q^{3b/4 - 3a/8 + gamma/2}.
double s2_envelope(std::uint64_t q, double gamma, const AfeParameters& params);

/// Numerical-zero threshold for central values.
inline constexpr double kVanishingThreshold = 1e-8;

struct MemberValue {
  std::uint32_t index = 0;  ///< character index t
  Complex lvalue;           ///< L(f x chi, 1/2)
  Complex mollifier;        ///< M_X(f x chi, 1/2)
  Complex afe;              ///< mollified AFE value
};

struct MomentReport {
  std::string curve;
  std::uint32_t q = 0;
  std::uint64_t d = 0;
  double gamma = 0.0;  ///< log_q d
  std::size_t orbit_size = 0;
  Complex average;      ///< mean of L * M over the orbit
  Complex afe_average;  ///< mean of the mollified AFE over the orbit
  Complex s1;
  Complex s2;
  Complex s2_kloosterman;
  Complex residual;  ///< average - 1 - s1 - s2
  double min_abs_L = 0.0;
  double min_abs_LM = 0.0;
  std::size_t vanishing_count = 0;
  double s1_envelope = 0.0;
  double s2_envelope = 0.0;
  std::vector<MemberValue> members;

  double residual_abs() const { return std::abs(residual); }
  bool average_nonzero() const { return std::abs(average) > kVanishingThreshold; }
};

MomentReport orbit_average_moment(const EllipticCurveForm& form, const GaloisOrbit& orbit,
                                  const AfeParameters& params);

/// One row of a scan: a report, or a skip notice when q divides N.
struct ScanRecord {
  std::uint32_t q = 0;
  std::optional<MomentReport> report;
  std::string warning;
};

/// For each q and each Galois orbit whose order is at least order_floor,
/// an orbit report. Rows are ordered by q, then by increasing d.
/// `threads` <= 1 runs inline.
std::vector<ScanRecord> nonvanishing_scan(const EllipticCurveForm& form,
                                          const std::vector<std::uint64_t>& q_list,
                                          std::uint64_t order_floor,
                                          const AfeParameters& params, unsigned threads = 1);

}  // namespace nvtwist
