#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nvtwist/rational.hpp"

namespace nvtwist {

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct WeierstrassModel {
  std::int64_t a1 = 0;
  std::int64_t a2 = 0;
  std::int64_t a3 = 0;
  std::int64_t a4 = 0;
  std::int64_t a6 = 0;

  BigInt discriminant() const;
  bool operator==(const WeierstrassModel&) const = default;
};

namespace detail {
class LambdaCache;
}

/// A rational elliptic curve viewed as a weight-2 newform of level N with
/// rational coefficients. The root number epsilon is configured, not derived.
///
/// Copies share one eigenvalue cache; the cache is safe for concurrent use
/// and every reader observes identical values.
class EllipticCurveForm {
 public:
  EllipticCurveForm(std::string label, WeierstrassModel model,
                    std::uint64_t conductor, int epsilon);

  const std::string& label() const noexcept { return label_; }
  const WeierstrassModel& model() const noexcept { return model_; }
  std::uint64_t conductor() const noexcept { return conductor_; }
  int epsilon() const noexcept { return epsilon_; }

  /// p + 1 - #E(F_p), counting the point at infinity. Works for bad p too.
  std::int64_t ap(std::uint64_t p) const;

  /// Normalized Hecke eigenvalue lambda_f(n), n >= 1.
  double lambda(std::uint64_t n) const;

  /// Snapshot of lambda_f(0..n_max) with slot 0 set to 0.
  std::shared_ptr<const std::vector<double>> lambda_table(std::uint64_t n_max) const;

 private:
  std::string label_;
  WeierstrassModel model_;
  std::uint64_t conductor_;
  int epsilon_;
  std::shared_ptr<detail::LambdaCache> cache_;
};

/// a_p by direct point enumeration, independent of any curve object.
std::int64_t count_ap(const WeierstrassModel& model, std::uint64_t p);

/// c_n for n <= floor(X) (slot 0 unused): the truncated Dirichlet inverse of
/// L(f, s), built from the inverted Euler factors.
std::vector<double> mollifier_coeffs(const EllipticCurveForm& form, double x_len);

/// a_n = sum_{m | n, m <= X} lambda_f(n/m) c_m for n <= n_max (slot 0 unused).
std::vector<double> tail_coeffs(const EllipticCurveForm& form, double x_len,
                                std::uint64_t n_max);

/// Convolution of lambda_f with given coefficients c (indices 1..c.size()-1),
/// evaluated for every n <= n_max.
std::vector<double> dirichlet_convolve(const std::vector<double>& lambda,
                                       const std::vector<double>& c,
                                       std::uint64_t n_max);

}  // namespace nvtwist
