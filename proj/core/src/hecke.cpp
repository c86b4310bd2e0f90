#include "nvtwist/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <shared_mutex>

#include "nvtwist/errors.hpp"
#include "nvtwist/modarith.hpp"

namespace nvtwist {

BigInt WeierstrassModel::discriminant() const {
  const BigInt A1 = a1, A2 = a2, A3 = a3, A4 = a4, A6 = a6;
  const BigInt b2 = A1 * A1 + 4 * A2;
  const BigInt b4 = 2 * A4 + A1 * A3;
  const BigInt b6 = A3 * A3 + 4 * A6;
  const BigInt b8 = A1 * A1 * A6 + 4 * A2 * A6 - A1 * A3 * A4 + A2 * A3 * A3 - A4 * A4;
  return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

std::int64_t count_ap(const WeierstrassModel& m, std::uint64_t p) {
  if (!is_prime(p)) throw PreconditionError("ap: " + std::to_string(p) + " is not prime");
  const auto P = static_cast<std::int64_t>(p);
  auto red = [P](std::int64_t v) { return ((v % P) + P) % P; };
  const std::int64_t a1 = red(m.a1), a2 = red(m.a2), a3 = red(m.a3), a4 = red(m.a4),
                     a6 = red(m.a6);

  std::int64_t affine = 0;
  if (p == 2) {
    for (std::int64_t x = 0; x < 2; ++x) {
      for (std::int64_t y = 0; y < 2; ++y) {
        const std::int64_t lhs = y * y + a1 * x * y + a3 * y;
        const std::int64_t rhs = x * x * x + a2 * x * x + a4 * x + a6;
        if (red(lhs - rhs) == 0) ++affine;
      }
    }
  } else {
    // Number of square roots of each residue.
    std::vector<std::uint8_t> roots(p, 0);
    for (std::int64_t y = 0; y < P; ++y) ++roots[y * y % P];
    for (std::int64_t x = 0; x < P; ++x) {
      const std::int64_t b = (a1 * x + a3) % P;
      const std::int64_t f = (((x + a2) * x % P + a4) * x % P + a6) % P;
      affine += roots[(b * b + 4 * f) % P];
    }
  }
  return P + 1 - (affine + 1);
}

namespace detail {

class LambdaCache {
 public:
  LambdaCache(WeierstrassModel model, std::uint64_t conductor)
      : model_(model), conductor_(conductor),
        table_(std::make_shared<const std::vector<double>>(std::vector<double>{0.0, 1.0})) {}

  std::int64_t ap(std::uint64_t p) {
    {
      std::shared_lock lock(mutex_);
      if (p < ap_.size() && ap_known_[p]) return ap_[p];
    }
    return count_ap(model_, p);
  }

  std::shared_ptr<const std::vector<double>> table(std::uint64_t n_max) {
    {
      std::shared_lock lock(mutex_);
      if (table_->size() > n_max) return table_;
    }
    std::unique_lock lock(mutex_);
    if (table_->size() > n_max) return table_;
    extend(std::max<std::uint64_t>({n_max, 2 * (table_->size() - 1), 1024}));
    return table_;
  }

 private:
  void extend(std::uint64_t n_max) {
    const std::size_t size = n_max + 1;
    std::vector<std::uint32_t> spf(size, 0);
    for (std::uint64_t i = 2; i < size; ++i) {
      if (spf[i] != 0) continue;
      for (std::uint64_t j = i; j < size; j += i) {
        if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
      }
    }

    const std::size_t known = ap_.size();
    ap_.resize(size, 0);
    ap_known_.resize(size, false);
    for (std::uint64_t p = std::max<std::size_t>(known, 2); p < size; ++p) {
      if (spf[p] == p) {
        ap_[p] = count_ap(model_, p);
        ap_known_[p] = true;
      }
    }

    std::vector<double> lam(size, 0.0);
    lam[1] = 1.0;
    for (std::uint64_t n = 2; n < size; ++n) {
      const std::uint64_t p = spf[n];
      std::uint64_t rest = n;
      while (rest % p == 0) rest /= p;
      if (rest > 1) {
        lam[n] = lam[n / rest] * lam[rest];
      } else if (n == p) {
        lam[n] = static_cast<double>(ap_[p]) / std::sqrt(static_cast<double>(p));
      } else if (conductor_ % p == 0) {
        lam[n] = lam[p] * lam[n / p];
      } else {
        lam[n] = lam[p] * lam[n / p] - lam[n / p / p];
      }
    }
    table_ = std::make_shared<const std::vector<double>>(std::move(lam));
  }

  WeierstrassModel model_;
  std::uint64_t conductor_;
  std::shared_mutex mutex_;
  std::vector<std::int64_t> ap_;
  std::vector<bool> ap_known_;
  std::shared_ptr<const std::vector<double>> table_;
};

}  // namespace detail

EllipticCurveForm::EllipticCurveForm(std::string label, WeierstrassModel model,
                                     std::uint64_t conductor, int epsilon)
    : label_(std::move(label)), model_(model), conductor_(conductor), epsilon_(epsilon) {
  if (model_.discriminant() == 0) {
    throw PreconditionError("curve " + label_ + ": singular model (discriminant 0)");
  }
  if (conductor_ == 0) throw PreconditionError("curve " + label_ + ": conductor must be positive");
  if (epsilon_ != 1 && epsilon_ != -1) {
    throw PreconditionError("curve " + label_ + ": epsilon must be +1 or -1");
  }
  cache_ = std::make_shared<detail::LambdaCache>(model_, conductor_);
}

std::int64_t EllipticCurveForm::ap(std::uint64_t p) const { return cache_->ap(p); }

double EllipticCurveForm::lambda(std::uint64_t n) const {
  if (n == 0) throw PreconditionError("hecke_lambda: n must be >= 1");
  return (*cache_->table(n))[n];
}

std::shared_ptr<const std::vector<double>> EllipticCurveForm::lambda_table(
    std::uint64_t n_max) const {
  return cache_->table(std::max<std::uint64_t>(n_max, 1));
}

std::vector<double> mollifier_coeffs(const EllipticCurveForm& form, double x_len) {
  if (!(x_len >= 1.0)) throw PreconditionError("mollifier_coeffs: X must be >= 1");
  const auto x_max = static_cast<std::uint64_t>(std::floor(x_len));
  const auto lam = form.lambda_table(x_max);
  std::vector<double> c(x_max + 1, 0.0);
  for (std::uint64_t n = 1; n <= x_max; ++n) {
    double value = 1.0;
    for (auto [p, e] : factorize(n)) {
      // Local factor 1 - lambda(p) x + x^2 at good p, 1 - lambda(p) x at bad p.
      if (e == 1) {
        value *= -(*lam)[p];
      } else if (e > 2 || form.conductor() % p == 0) {
        value = 0.0;
        break;
      }
    }
    c[n] = value;
  }
  return c;
}

std::vector<double> dirichlet_convolve(const std::vector<double>& lambda,
                                       const std::vector<double>& c,
                                       std::uint64_t n_max) {
  std::vector<double> out(n_max + 1, 0.0);
  for (std::uint64_t m = 1; m < c.size() && m <= n_max; ++m) {
    if (c[m] == 0.0) continue;
    for (std::uint64_t k = 1; k * m <= n_max; ++k) out[k * m] += c[m] * lambda[k];
  }
  return out;
}

std::vector<double> tail_coeffs(const EllipticCurveForm& form, double x_len,
                                std::uint64_t n_max) {
  if (static_cast<double>(n_max) < x_len) {
    throw PreconditionError("tail_coeffs: n_max must be >= X");
  }
  const auto lam = form.lambda_table(n_max);
  return dirichlet_convolve(*lam, mollifier_coeffs(form, x_len), n_max);
}

}  // namespace nvtwist
