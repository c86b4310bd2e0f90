#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nvtwist/curve_io.hpp"
#include "nvtwist/errors.hpp"
#include "nvtwist/report_io.hpp"

namespace nvtwist {
namespace {

TEST(CurveTable, ParsesColumnsInAnyOrder) {
  const auto curves = parse_curve_table(
      "# comment line\n"
      "epsilon label conductor a6 a4 a3 a2 a1\n"
      "-1 37a 37 0 -1 1 0 0   # trailing comment\n"
      "\n"
      "1 32a 32 0 -1 0 0 0\n");
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[0].label(), "37a");
  EXPECT_EQ(curves[0].epsilon(), -1);
  EXPECT_EQ(curves[0].conductor(), 37u);
  EXPECT_EQ(curves[0].model(), (WeierstrassModel{0, 0, 1, -1, 0}));
  EXPECT_EQ(find_curve(curves, "32a").model().a4, -1);
  EXPECT_THROW(find_curve(curves, "99z"), PreconditionError);
}

TEST(CurveTable, Errors) {
  EXPECT_THROW(parse_curve_table(""), ParseError);
  EXPECT_THROW(parse_curve_table("label a1 a2 a3 a4 conductor epsilon\n"), ParseError);
  EXPECT_THROW(parse_curve_table("label a1 a2 a3 a4 a6 conductor epsilon\nx 0 0 0 -1\n"), ParseError);
  EXPECT_THROW(parse_curve_table("label a1 a2 a3 a4 a6 conductor epsilon\nx 0 0 0 -1 q 32 1\n"),
               ParseError);
  EXPECT_THROW(parse_curve_table("label a1 a2 a3 a4 a6 conductor epsilon\nx 0 0 0 -1 0 0 1\n"),
               ParseError);
  EXPECT_THROW(parse_curve_table("label a1 a2 a3 a4 a6 conductor epsilon\nx 0 0 0 -1 0 32 3\n"),
               PreconditionError);
  EXPECT_THROW(load_curve_file("/nonexistent/curves.txt"), PreconditionError);
}

TEST(CurveTable, ShippedFileHasSampleCurves) {
  const auto curves = load_curve_file(NVTWIST_TEST_CURVES);
  EXPECT_GE(curves.size(), 2u);
  EXPECT_NO_THROW(find_curve(curves, "32a"));
  EXPECT_NO_THROW(find_curve(curves, "11a"));
}

TEST(Json, DoublesAndStrings) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-2.0), "-2");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "null");
  EXPECT_EQ(format_double(std::nan("")), "null");
  EXPECT_EQ(json_string("a\"b\\c\n"), "\"a\\\"b\\\\c\\n\"");
  JsonLine line;
  line.add("x", 1).add("s", "t").add("b", true).add_raw("arr", "[1,2]");
  EXPECT_EQ(line.str(), "{\"x\":1,\"s\":\"t\",\"b\":true,\"arr\":[1,2]}");
}

MomentReport sample_report() {
  MomentReport r;
  r.curve = "32a";
  r.q = 13;
  r.d = 1;
  r.orbit_size = 4;
  r.average = {1.25, -0.5};
  r.s1 = {0.25, 0.0};
  r.s2 = {0.125, 0.0};
  r.residual = r.average - 1.0 - r.s1 - r.s2;
  r.min_abs_L = 2.0;
  return r;
}

TEST(Json, MomentReportFieldOrder) {
  const std::string json = moment_report_json(sample_report());
  const std::vector<std::string> keys{"curve", "q", "d", "gamma", "orbit_size", "average_re",
                                      "average_im", "s1_re", "s1_im", "s2_re", "s2_im",
                                      "residual_abs", "min_abs_L", "vanishing_count"};
  std::size_t pos = 0;
  for (const auto& key : keys) {
    const auto found = json.find("\"" + key + "\":", pos);
    ASSERT_NE(found, std::string::npos) << key;
    pos = found;
  }
  EXPECT_NE(json.find("\"average_re\":1.25"), std::string::npos);
  EXPECT_EQ(json.front(), '{');
  EXPECT_EQ(json.back(), '}');
}

TEST(Json, SkippedScanRecord) {
  ScanRecord skip;
  skip.q = 11;
  skip.warning = "q divides N";
  EXPECT_EQ(scan_record_json(skip), "{\"q\":11,\"skipped\":true,\"warning\":\"q divides N\"}");
}

TEST(Csv, HeaderMatchesRowWidth) {
  const auto& header = moment_csv_header();
  ASSERT_FALSE(header.empty());
  EXPECT_EQ(header.front(), "curve");
  const std::string row = moment_report_csv(sample_report());
  EXPECT_EQ(static_cast<std::size_t>(std::count(row.begin(), row.end(), ',')), header.size() - 1);
  ScanRecord skip;
  skip.q = 11;
  skip.warning = "skipped";
  const std::string skip_row = scan_record_csv(skip);
  EXPECT_EQ(static_cast<std::size_t>(std::count(skip_row.begin(), skip_row.end(), ',')), header.size() - 1);
}

}  // namespace
}  // namespace nvtwist
