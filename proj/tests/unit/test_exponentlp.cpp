#include <gtest/gtest.h>

#include <random>

#include "nvtwist/errors.hpp"
#include "nvtwist/exponentlp.hpp"

namespace nvtwist::lp {
namespace {

Rational r(long long num, long long den = 1) { return make_rational(num, den); }

class RandomRationals {
 public:
  explicit RandomRationals(std::uint64_t seed) : rng_(seed) {}
  Rational next(long long range = 20, long long max_den = 12) {
    std::uniform_int_distribution<long long> num(-range, range), den(1, max_den);
    return make_rational(num(rng_), den(rng_));
  }
  Rational positive(long long max_den = 9) {
    std::uniform_int_distribution<long long> num(1, 30), den(1, max_den);
    return make_rational(num(rng_), den(rng_));
  }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  std::mt19937_64 rng_;
};

TEST(Parse, MinimalProgram) {
  const auto p = parse_program("maximize gamma\ngamma - b/2 <= 0\n");
  EXPECT_EQ(p.objective, "gamma");
  ASSERT_EQ(p.constraints.size(), 1u);
  const auto gi = p.variable_index("gamma"), bi = p.variable_index("b");
  EXPECT_EQ(p.constraints[0].coeffs[gi], r(1));
  EXPECT_EQ(p.constraints[0].coeffs[bi], r(-1, 2));
  EXPECT_EQ(p.constraints[0].rhs, r(0));
}

TEST(Parse, ChainedRelation) {
  const auto p = parse_program("variables a, c\nmaximize a\na + 1 <= c <= 2\n");
  ASSERT_EQ(p.constraints.size(), 2u);
  EXPECT_EQ(p.constraints[0], (Constraint{{r(1), r(-1)}, r(-1)}));
  EXPECT_EQ(p.constraints[1], (Constraint{{r(0), r(1)}, r(2)}));
}

TEST(Parse, ImplicitMultiplicationAndComments) {
  const auto p = parse_program(
      "# leading comment\n"
      "variables x, y\n"
      "maximize y   # trailing\n"
      "(3x/4) - (1/16) + 2*y <= -x (* inline *)\n");
  ASSERT_EQ(p.constraints.size(), 1u);
  EXPECT_EQ(p.constraints[0], (Constraint{{r(7, 4), r(2)}, r(1, 16)}));
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_program("maximize gamma\ngamma*a <= 1\n"), ParseError);
  EXPECT_THROW(parse_program("maximize x\nx <= 0.5\n"), ParseError);
  EXPECT_THROW(parse_program("maximize x\nx >= 0\n"), ParseError);
  EXPECT_THROW(parse_program("maximize x\nx + <= 1\n"), ParseError);
  EXPECT_THROW(parse_program("variables x\nmaximize x\nx + z <= 1\n"), ParseError);
  EXPECT_THROW(parse_program("x <= 1\n"), ParseError);
  EXPECT_THROW(parse_program("maximize x\nx <= 1 (* open\n"), ParseError);
  EXPECT_THROW(parse_program("maximize x\nx/y <= 1\n"), ParseError);
}

TEST(Parse, ErrorCarriesPosition) {
  try {
    parse_program("maximize gamma\ngamma*a <= 1\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GE(e.column(), 1u);
  }
}

TEST(Parse, MathematicaFormMatchesBuiltinProgram) {
  const char* text =
      "Maximize[{gamma, gamma - (b/2) <= 0 &&  gamma + (c/2) - 1 <= 0 &&\n"
      "    a + 1 <= c <= 2 &&  (3b/4) - (3a/8) - (1/16) + gamma <= 0 &&\n"
      "    (3b/4) - (3a/8) + (gamma/2) <= 0 && 0 <= 2b <= a <= 1}, {gamma, a, b, c}]\n";
  EXPECT_EQ(parse_program(text), chinta_program());
}

TEST(Print, RoundTripBuiltin) {
  const auto p = chinta_program();
  EXPECT_EQ(parse_program(print_program(p)), p);
}

TEST(Print, RoundTripRandomPrograms) {
  RandomRationals gen(42);
  const std::vector<std::string> names{"x", "y1", "gamma", "b_2", "zeta"};
  for (int trial = 0; trial < 200; ++trial) {
    ExponentProgram p;
    const std::size_t n = 1 + gen.index(names.size());
    p.variables.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(n));
    p.objective = p.variables[gen.index(n)];
    const std::size_t m = 1 + gen.index(6);
    for (std::size_t i = 0; i < m; ++i) {
      Constraint c;
      for (std::size_t j = 0; j < n; ++j) c.coeffs.push_back(gen.index(3) == 0 ? r(0) : gen.next());
      c.rhs = gen.next();
      p.constraints.push_back(c);
    }
    EXPECT_EQ(parse_program(print_program(p)), p) << print_program(p);
  }
}

TEST(Solve, BuiltinOptimum) {
  const auto s = solve(chinta_program());
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_EQ(s.value, r(7, 52));
  EXPECT_EQ(s.witness, (std::vector<Rational>{r(7, 52), r(19, 26), r(7, 26), r(45, 26)}));
  EXPECT_TRUE(feasible(chinta_program(), s.witness));
}

TEST(Solve, TinyPrograms) {
  const auto bounded = solve(parse_program("maximize x\nx <= 1\n"));
  EXPECT_EQ(bounded.status, SolveStatus::optimal);
  EXPECT_EQ(bounded.value, r(1));
  EXPECT_EQ(solve(parse_program("maximize x\n-x <= 0\n")).status, SolveStatus::unbounded);
  EXPECT_EQ(solve(parse_program("maximize x\nx <= 0\n1 <= x\n")).status, SolveStatus::infeasible);
  // Free direction orthogonal to the objective.
  const auto free_y = solve(parse_program("variables x, y\nmaximize x\nx <= 3/2\n"));
  EXPECT_EQ(free_y.status, SolveStatus::optimal);
  EXPECT_EQ(free_y.value, r(3, 2));
  const auto line = solve(parse_program("variables x, y\nmaximize x\nx + y <= 1\n-y <= 0\n"));
  EXPECT_EQ(line.status, SolveStatus::optimal);
  EXPECT_EQ(line.value, r(1));
  EXPECT_EQ(line.witness, (std::vector<Rational>{r(1), r(0)}));
  EXPECT_EQ(solve(parse_program("variables x, y\nmaximize x\ny <= x\n")).status,
            SolveStatus::unbounded);
}

TEST(Solve, TieBreakIsLexicographic) {
  // Every point of the edge x = 1, 0 <= y <= 1 is optimal.
  const auto s = solve(parse_program("variables x, y\nmaximize x\nx <= 1\n-y <= 0\ny <= 1\n"));
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_EQ(s.witness, (std::vector<Rational>{r(1), r(0)}));
}

TEST(Solve, RowScalingInvariance) {
  RandomRationals gen(9);
  const auto base = solve(chinta_program());
  for (int trial = 0; trial < 20; ++trial) {
    auto p = chinta_program();
    for (auto& c : p.constraints) {
      const Rational s = gen.positive();
      for (auto& coeff : c.coeffs) coeff *= s;
      c.rhs *= s;
    }
    const auto scaled = solve(p);
    EXPECT_EQ(scaled.status, base.status);
    EXPECT_EQ(scaled.value, base.value);
    EXPECT_EQ(scaled.witness, base.witness);
  }
}

TEST(Solve, RandomFeasiblePointsNeverBeatOptimum) {
  const auto p = chinta_program();
  const auto best = solve(p).value;
  RandomRationals gen(123);
  int feasible_count = 0;
  for (int trial = 0; trial < 200000 && feasible_count < 2000; ++trial) {
    std::vector<Rational> x{gen.next(3, 60) / 10, gen.next(60, 60) / 60, gen.next(30, 60) / 60,
                            1 + gen.next(60, 60) / 60};
    if (!feasible(p, x)) continue;
    ++feasible_count;
    EXPECT_LE(x[0], best);
  }
  EXPECT_GT(feasible_count, 100);
}

TEST(Solve, RandomProgramsAgreeWithSampler) {
  RandomRationals gen(77);
  for (int trial = 0; trial < 40; ++trial) {
    ExponentProgram p;
    p.variables = {"x", "y"};
    p.objective = "x";
    // Box keeps the program bounded; random cuts on top.
    p.constraints = {{{r(1), r(0)}, r(5)}, {{r(-1), r(0)}, r(5)}, {{r(0), r(1)}, r(5)},
                     {{r(0), r(-1)}, r(5)}};
    for (int i = 0; i < 3; ++i) p.constraints.push_back({{gen.next(5, 3), gen.next(5, 3)}, gen.next(5, 2)});
    const auto s = solve(p);
    if (s.status != SolveStatus::optimal) {
      EXPECT_EQ(s.status, SolveStatus::infeasible);
      continue;
    }
    EXPECT_TRUE(feasible(p, s.witness));
    for (int k = 0; k < 500; ++k) {
      const std::vector<Rational> x{gen.next(50, 10), gen.next(50, 10)};
      if (feasible(p, x)) EXPECT_LE(x[0], s.value);
    }
  }
}

TEST(Envelope, ValuesAtOptimum) {
  const auto [branch_gamma, branch_k] = s2_exponent_branches(4, r(19, 26), r(7, 26), r(7, 52));
  EXPECT_EQ(branch_gamma, r(0));
  EXPECT_EQ(branch_k, r(-1, 208));
  EXPECT_EQ(s2_exponent_envelope(4, r(19, 26), r(7, 26), r(7, 52)), r(0));
  EXPECT_THROW(s2_exponent_envelope(1, r(1, 2), r(1, 4), r(0)), PreconditionError);
}

TEST(Envelope, KFourBranchesAreTheConstraintExponents) {
  RandomRationals gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Rational a = gen.next(), b = gen.next(), g = gen.next();
    const auto [first, second] = s2_exponent_branches(4, a, b, g);
    const Rational e1 = 3 * b / 4 - 3 * a / 8 - r(1, 16) + g;
    const Rational e2 = 3 * b / 4 - 3 * a / 8 + g / 2;
    EXPECT_EQ(first - e1, r(0));
    EXPECT_EQ(second - e2, r(0));
    EXPECT_EQ(s2_exponent_envelope(4, a, b, g), std::max(e1, e2));
  }
}

TEST(Envelope, BalancingK) {
  EXPECT_EQ(balancing_k(r(1, 8)), r(4));
  for (int k = 2; k <= 9; ++k) {
    const Rational g = r(1, 2 * k);
    const auto [first, second] = s2_exponent_branches(k, r(1, 2), r(1, 5), g);
    EXPECT_EQ(first, second) << k;
  }
}

}  // namespace
}  // namespace nvtwist::lp
