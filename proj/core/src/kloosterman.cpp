#include "nvtwist/kloosterman.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "nvtwist/errors.hpp"

namespace nvtwist {

KloostermanTable::KloostermanTable(std::shared_ptr<const PrimeModulus> modulus)
    : modulus_(std::move(modulus)) {
  const PrimeModulus& m = *modulus_;
  const std::uint64_t q = m.q();
  std::vector<std::uint32_t> inverse(q, 0);
  for (std::uint32_t x = 1; x < q; ++x) inverse[x] = m.inv_mod(x);
  values_.assign(q, 0.0);
  for (std::uint64_t b = 0; b < q; ++b) {
    double sum = 0.0;
    for (std::uint64_t x = 1; x < q; ++x) sum += m.additive_cos(static_cast<std::int64_t>((x + b * inverse[x]) % q));
    values_[b] = sum;
  }
}

double KloostermanTable::operator()(std::int64_t a, std::int64_t b) const noexcept {
  const PrimeModulus& m = *modulus_;
  const std::uint64_t ra = m.reduce(a), rb = m.reduce(b);
  if (ra != 0) return values_[ra * rb % m.q()];
  if (rb != 0) return values_[0];  // Ramanujan sum, -1
  return static_cast<double>(m.q() - 1);
}

Complex kloosterman_direct(std::int64_t a, std::int64_t b, const PrimeModulus& modulus) {
  const std::int64_t q = modulus.q();
  Complex sum{0.0, 0.0};
  for (std::int64_t x = 1; x < q; ++x) {
    const std::int64_t phase = (modulus.reduce(a) * x + modulus.reduce(b) * static_cast<std::int64_t>(modulus.inv_mod(x))) % q;
    sum += modulus.additive_root(phase);
  }
  return sum;
}

bool in_D(std::span<const std::uint32_t> tuple) {
  if (tuple.size() < 2 || tuple.size() % 2 != 0) {
    throw PreconditionError("in_D: tuple length must be even and >= 2");
  }
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (std::count(tuple.begin(), tuple.end(), tuple[i]) < 2) return false;
  }
  return true;
}

double moment_sum(std::span<const std::uint32_t> rs, const KloostermanTable& table) {
  const std::uint32_t q = table.modulus().q();
  long double sum = 0.0L;
  for (std::uint64_t h = 1; h < q; ++h) {
    long double prod = 1.0L;
    for (std::uint32_t r : rs) prod *= table.s1(static_cast<std::uint32_t>(h * (r % q) % q));
    sum += prod;
  }
  return static_cast<double>(sum);
}

std::int64_t moment_sum_integer(std::span<const std::uint32_t> rs, const KloostermanTable& table) {
  const double value = moment_sum(rs, table);
  const double rounded = std::round(value);
  if (std::abs(value - rounded) > 1e-3 * std::max(1.0, std::abs(value) * 1e-9)) {
    throw std::runtime_error("moment_sum_integer: sum is not numerically integral");
  }
  return static_cast<std::int64_t>(rounded);
}

namespace {

struct Enumeration {
  const KloostermanTable* table;
  std::span<const Rational> weights;
  std::size_t length;
  std::map<std::vector<std::uint32_t>, std::int64_t> moment_cache;
  std::vector<std::uint32_t> tuple;
  WeightedMomentReport* report;
  double sqrt_scale;  // q^{k+1/2}

  std::int64_t abs_moment(const std::vector<std::uint32_t>& t) {
    std::vector<std::uint32_t> key(t);
    std::sort(key.begin(), key.end());
    auto it = moment_cache.find(key);
    if (it == moment_cache.end()) {
      it = moment_cache.emplace(key, std::abs(moment_sum_integer(key, *table))).first;
    }
    return it->second;
  }

  void walk(const Rational& prefix) {
    if (tuple.size() == length) {
      const std::int64_t m = abs_moment(tuple);
      const Rational term = prefix * m;
      if (in_D(tuple)) {
        report->diagonal += term;
        ++report->diagonal_tuples;
      } else {
        report->off_diagonal += term;
        ++report->off_diagonal_tuples;
        report->max_off_diagonal_moment_ratio =
            std::max(report->max_off_diagonal_moment_ratio, static_cast<double>(m) / sqrt_scale);
      }
      return;
    }
    for (std::size_t r = 0; r < weights.size(); ++r) {
      if (weights[r] == 0) continue;
      tuple.push_back(static_cast<std::uint32_t>(r + 1));
      walk(prefix * abs(weights[r]));
      tuple.pop_back();
    }
  }

  // Sum over non-decreasing tuples weighted by the number of orderings.
  Rational multiset_total(std::size_t start, std::vector<std::uint32_t>& ms) {
    if (ms.size() == length) {
      std::map<std::uint32_t, int> counts;
      for (auto r : ms) ++counts[r];
      BigInt orderings = 1;
      for (std::size_t i = 2; i <= length; ++i) orderings *= i;
      Rational weight(orderings);
      for (auto [r, c] : counts) {
        for (int i = 2; i <= c; ++i) weight /= i;
        for (int i = 0; i < c; ++i) weight *= abs(weights[r - 1]);
      }
      return weight * abs_moment(ms);
    }
    Rational sum = 0;
    for (std::size_t r = start; r < weights.size(); ++r) {
      if (weights[r] == 0) continue;
      ms.push_back(static_cast<std::uint32_t>(r + 1));
      sum += multiset_total(r, ms);
      ms.pop_back();
    }
    return sum;
  }
};

}  // namespace

WeightedMomentReport weighted_moment_report(std::span<const Rational> z, int k, const KloostermanTable& table) {
  const std::uint32_t q = table.modulus().q();
  if (k < 1) throw PreconditionError("weighted_moment_report: k must be >= 1");
  if (z.empty()) throw PreconditionError("weighted_moment_report: empty weight sequence");
  if (z.size() >= q) throw PreconditionError("weighted_moment_report: R must be < q");
  const std::size_t length = 2 * static_cast<std::size_t>(k);
  if (std::pow(static_cast<double>(z.size()), static_cast<double>(length)) >
      static_cast<double>(kMaxWeightedMomentTuples)) {
    throw PreconditionError("weighted_moment_report: R^{2k} tuples exceed the enumeration limit");
  }

  WeightedMomentReport report;
  report.q = q;
  report.k = k;
  report.R = z.size();
  for (std::size_t j = 1; j <= length; ++j) {
    Rational lj = 0;
    for (const auto& w : z) {
      Rational p = 1;
      for (std::size_t i = 0; i < j; ++i) p *= abs(w);
      lj += p;
    }
    report.moments.push_back(lj);
  }
  const Rational& l1 = report.moments.front();
  if (l1 < 1) throw PreconditionError("weighted_moment_report: moment condition L_1 >= 1 fails");
  for (std::size_t j = 1; j < length; ++j) {
    if (report.moments[j] > l1) {
      throw PreconditionError("weighted_moment_report: moment condition L_" + std::to_string(j + 1) +
                              " <= L_1 fails");
    }
  }

  report.diagonal = 0;
  report.off_diagonal = 0;
  const double qd = q;
  Enumeration walker{&table, z, length, {}, {}, &report, std::pow(qd, k + 0.5)};
  walker.walk(Rational(1));
  std::vector<std::uint32_t> ms;
  report.total = walker.multiset_total(0, ms);

  const double l1d = to_double(l1);
  report.diagonal_bound = std::pow(l1d, k) * std::pow(qd, k + 1);
  report.off_diagonal_bound = std::pow(l1d, 2 * k) * std::pow(qd, k + 0.5);
  report.diagonal_ratio = to_double(report.diagonal) / report.diagonal_bound;
  report.off_diagonal_ratio = to_double(report.off_diagonal) / report.off_diagonal_bound;
  return report;
}

}  // namespace nvtwist
