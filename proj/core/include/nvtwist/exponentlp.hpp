#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nvtwist/rational.hpp"

namespace nvtwist::lp {

/// coeffs . x <= rhs
struct Constraint {
  std::vector<Rational> coeffs;
  Rational rhs;
  bool operator==(const Constraint&) const = default;
};

/// A linear program in named exponent variables, maximizing one variable.
/// Strict inequalities are modelled as non-strict ones.
struct ExponentProgram {
  std::vector<std::string> variables;
  std::vector<Constraint> constraints;
  std::string objective;

  std::size_t objective_index() const;
  std::size_t variable_index(std::string_view name) const;
  bool operator==(const ExponentProgram&) const = default;
};

/// Accepts either the native line format
///
///   variables gamma, a, b, c      # optional; when present, names are checked
///   maximize gamma
///   gamma - b/2 <= 0
///   a + 1 <= c <= 2
///
/// or a Mathematica call  Maximize[{obj, c1 && c2 && ...}, {vars}].
/// Coefficients are exact rationals; `3b/4` means 3*b/4. Throws ParseError
/// for syntax errors, unknown variables and nonlinear terms.
ExponentProgram parse_program(std::string_view text);

/// Native-format text that parses back to an equal program.
std::string print_program(const ExponentProgram& program);

enum class SolveStatus { optimal, unbounded, infeasible };

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  Rational value;
  std::vector<Rational> witness;  ///< in program variable order
  std::size_t subsystems = 0;     ///< square subsystems examined
};

std::string to_string(SolveStatus status);

/// Exhaustive vertex enumeration in exact arithmetic. Among optimal vertices
/// the lexicographically smallest witness is reported.
Solution solve(const ExponentProgram& program);

/// True iff x satisfies every constraint exactly.
bool feasible(const ExponentProgram& program, const std::vector<Rational>& x);

/// The exponent constraint system for S1 = o(1) and S2 = o(1), maximizing gamma
/// over (gamma, a, b, c).
ExponentProgram chinta_program();

/// The two branches of the S2 exponent for a given k (epsilon dropped):
///   b(1-1/k) - a(1/2 - 1/(2k)) - 1/(4k) + gamma/2 + {gamma/2, 1/(4k)}.
std::pair<Rational, Rational> s2_exponent_branches(int k, const Rational& a, const Rational& b,
                                                   const Rational& gamma);
/// The larger branch. Throws PreconditionError for k < 2.
Rational s2_exponent_envelope(int k, const Rational& a, const Rational& b, const Rational& gamma);

/// The k at which the two branches balance, 1 / (2 gamma).
Rational balancing_k(const Rational& gamma);

}  // namespace nvtwist::lp
