#include "nvtwist/curve_io.hpp"

#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "nvtwist/errors.hpp"

namespace nvtwist {

namespace {

constexpr std::array<const char*, 8> kColumns = {"label", "a1", "a2", "a3", "a4", "a6",
                                                 "conductor", "epsilon"};

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream is(line.substr(0, line.find('#')));
  std::vector<std::string> out;
  for (std::string f; is >> f;) out.push_back(f);
  return out;
}

std::int64_t parse_int(const std::string& s, std::size_t line, const char* column) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ParseError(std::string("column '") + column + "': not an integer: " + s, line, 1);
  }
  return v;
}

}  // namespace

std::vector<EllipticCurveForm> parse_curve_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<EllipticCurveForm> curves;
  std::map<std::string, std::size_t> column_of;
  std::size_t width = 0;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (column_of.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) column_of[fields[i]] = i;
      for (const char* col : kColumns) {
        if (!column_of.contains(col)) {
          throw ParseError(std::string("curve table header lacks column '") + col + "'", line_no, 1);
        }
      }
      width = fields.size();
      continue;
    }
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no, 1);
    }
    auto get = [&](const char* col) { return parse_int(fields[column_of[col]], line_no, col); };
    WeierstrassModel model{get("a1"), get("a2"), get("a3"), get("a4"), get("a6")};
    const std::int64_t conductor = get("conductor");
    if (conductor <= 0) throw ParseError("conductor must be positive", line_no, 1);
    curves.emplace_back(fields[column_of["label"]], model, static_cast<std::uint64_t>(conductor),
                        static_cast<int>(get("epsilon")));
  }
  if (column_of.empty()) throw ParseError("curve table is empty", line_no, 1);
  return curves;
}

std::vector<EllipticCurveForm> load_curve_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open curve file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_curve_table(buffer.str());
}

const EllipticCurveForm& find_curve(const std::vector<EllipticCurveForm>& curves,
                                    std::string_view label) {
  for (const auto& c : curves) {
    if (c.label() == label) return c;
  }
  throw PreconditionError("no curve labelled '" + std::string(label) + "'");
}

}  // namespace nvtwist
