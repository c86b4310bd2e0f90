#include "nvtwist/report_io.hpp"

#include <cmath>
#include <cstdio>

namespace nvtwist {

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(static_cast<unsigned char>(ch)));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

void JsonLine::key(std::string_view k) {
  if (!body_.empty()) body_ += ",";
  body_ += json_string(k);
  body_ += ":";
}

JsonLine& JsonLine::add(std::string_view k, double value) {
  key(k);
  body_ += format_double(value);
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, std::int64_t value) {
  key(k);
  body_ += std::to_string(value);
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, std::uint64_t value) {
  key(k);
  body_ += std::to_string(value);
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, std::string_view value) {
  key(k);
  body_ += json_string(value);
  return *this;
}

JsonLine& JsonLine::add(std::string_view k, bool value) {
  key(k);
  body_ += value ? "true" : "false";
  return *this;
}

JsonLine& JsonLine::add_raw(std::string_view k, std::string_view json) {
  key(k);
  body_ += json;
  return *this;
}

std::string moment_report_json(const MomentReport& r) {
  return JsonLine()
      .add("curve", r.curve)
      .add("q", r.q)
      .add("d", r.d)
      .add("gamma", r.gamma)
      .add("orbit_size", static_cast<std::uint64_t>(r.orbit_size))
      .add("average_re", r.average.real())
      .add("average_im", r.average.imag())
      .add("s1_re", r.s1.real())
      .add("s1_im", r.s1.imag())
      .add("s2_re", r.s2.real())
      .add("s2_im", r.s2.imag())
      .add("residual_abs", r.residual_abs())
      .add("min_abs_L", r.min_abs_L)
      .add("vanishing_count", static_cast<std::uint64_t>(r.vanishing_count))
      .add("min_abs_LM", r.min_abs_LM)
      .add("s2_kloosterman_re", r.s2_kloosterman.real())
      .add("afe_average_re", r.afe_average.real())
      .add("afe_average_im", r.afe_average.imag())
      .add("s1_envelope", r.s1_envelope)
      .add("s2_envelope", r.s2_envelope)
      .add("average_nonzero", r.average_nonzero())
      .str();
}

std::string scan_record_json(const ScanRecord& record) {
  if (record.report) return moment_report_json(*record.report);
  return JsonLine().add("q", record.q).add("skipped", true).add("warning", record.warning).str();
}

const std::vector<std::string>& moment_csv_header() {
  static const std::vector<std::string> header = {
      "curve", "q", "d", "gamma", "orbit_size", "average_re", "average_im", "s1_re", "s1_im",
      "s2_re", "s2_im", "residual_abs", "min_abs_L", "vanishing_count", "min_abs_LM",
      "s2_kloosterman_re", "afe_average_re", "afe_average_im", "s1_envelope", "s2_envelope",
      "average_nonzero", "warning"};
  return header;
}

std::string moment_report_csv(const MomentReport& r) {
  std::string out = r.curve;
  auto col = [&out](const std::string& v) { out += "," + v; };
  col(std::to_string(r.q));
  col(std::to_string(r.d));
  col(format_double(r.gamma));
  col(std::to_string(r.orbit_size));
  col(format_double(r.average.real()));
  col(format_double(r.average.imag()));
  col(format_double(r.s1.real()));
  col(format_double(r.s1.imag()));
  col(format_double(r.s2.real()));
  col(format_double(r.s2.imag()));
  col(format_double(r.residual_abs()));
  col(format_double(r.min_abs_L));
  col(std::to_string(r.vanishing_count));
  col(format_double(r.min_abs_LM));
  col(format_double(r.s2_kloosterman.real()));
  col(format_double(r.afe_average.real()));
  col(format_double(r.afe_average.imag()));
  col(format_double(r.s1_envelope));
  col(format_double(r.s2_envelope));
  col(r.average_nonzero() ? "true" : "false");
  col("");
  return out;
}

std::string scan_record_csv(const ScanRecord& record) {
  if (record.report) return moment_report_csv(*record.report);
  std::string out = "," + std::to_string(record.q);
  for (std::size_t i = 2; i + 1 < moment_csv_header().size(); ++i) out += ",";
  // Warnings never contain commas or quotes they would need escaping for.
  return out + "," + record.warning;
}

}  // namespace nvtwist
