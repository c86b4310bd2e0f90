#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "nvtwist/hecke.hpp"

namespace nvtwist {

/// Whitespace-separated table. The first non-comment line names the columns
/// (label a1 a2 a3 a4 a6 conductor epsilon, any order); '#' starts a comment.
std::vector<EllipticCurveForm> parse_curve_table(std::string_view text);

std::vector<EllipticCurveForm> load_curve_file(const std::filesystem::path& path);

/// Throws PreconditionError when the label is absent.
const EllipticCurveForm& find_curve(const std::vector<EllipticCurveForm>& curves,
                                    std::string_view label);

}  // namespace nvtwist
