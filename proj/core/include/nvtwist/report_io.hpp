#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nvtwist/lfunctions.hpp"

namespace nvtwist {

/// 17 significant digits ("%.17g"); non-finite values become null in JSON.
std::string format_double(double value);

/// Builds one JSON object on a single line, keys in insertion order.
class JsonLine {
 public:
  JsonLine& add(std::string_view key, double value);
  JsonLine& add(std::string_view key, std::int64_t value);
  JsonLine& add(std::string_view key, std::uint64_t value);
  JsonLine& add(std::string_view key, int value) { return add(key, static_cast<std::int64_t>(value)); }
  JsonLine& add(std::string_view key, std::uint32_t value) {
    return add(key, static_cast<std::uint64_t>(value));
  }
  JsonLine& add(std::string_view key, std::string_view value);
  JsonLine& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
  JsonLine& add(std::string_view key, bool value);
  /// Inserts pre-serialized JSON.
  JsonLine& add_raw(std::string_view key, std::string_view json);

  std::string str() const { return "{" + body_ + "}"; }

 private:
  void key(std::string_view k);
  std::string body_;
};

std::string json_string(std::string_view s);

/// Fields: curve, q, d, gamma, orbit_size, average_re, average_im, s1_re,
/// s1_im, s2_re, s2_im, residual_abs, min_abs_L, vanishing_count, followed by
/// min_abs_LM, s2_kloosterman_re, afe_average_re, afe_average_im,
/// s1_envelope, s2_envelope, average_nonzero.
std::string moment_report_json(const MomentReport& report);
/// A report line, or {"q":..,"skipped":true,"warning":..}.
std::string scan_record_json(const ScanRecord& record);

const std::vector<std::string>& moment_csv_header();
std::string moment_report_csv(const MomentReport& report);
std::string scan_record_csv(const ScanRecord& record);

}  // namespace nvtwist
