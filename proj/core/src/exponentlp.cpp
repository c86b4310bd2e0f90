#include "nvtwist/exponentlp.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "nvtwist/errors.hpp"

namespace nvtwist::lp {

using nvtwist::to_string;

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  ident, number, plus, minus, star, slash, lparen, rparen, le, comma,
  andand, lbrace, rbrace, lbracket, rbracket, newline, semicolon, end
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto push = [&](Tok k, std::string text, std::size_t len) {
    out.push_back({k, std::move(text), line, col});
    i += len;
    col += len;
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '\n') {
      push(Tok::newline, "\\n", 1);
      ++line;
      col = 1;
      continue;
    }
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') ++i, ++col;
      continue;
    }
    if (ch == '(' && i + 1 < src.size() && src[i + 1] == '*') {  // (* comment *)
      const std::size_t close = src.find("*)", i + 2);
      if (close == std::string_view::npos) throw ParseError("unterminated comment", line, col);
      for (; i < close + 2; ++i) {
        if (src[i] == '\n') ++line, col = 1;
        else ++col;
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i, ++col;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::ident, std::string(src.substr(i, j - i)), j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        throw ParseError("decimal literals are not exact; write p/q", line, col);
      }
      push(Tok::number, std::string(src.substr(i, j - i)), j - i);
      continue;
    }
    const std::string_view rest = src.substr(i);
    if (rest.starts_with("<=")) { push(Tok::le, "<=", 2); continue; }
    if (rest.starts_with("&&")) { push(Tok::andand, "&&", 2); continue; }
    if (rest.starts_with(">=") || rest.starts_with("==") || ch == '<' || ch == '>' || ch == '=') {
      throw ParseError("only '<=' relations are supported", line, col);
    }
    switch (ch) {
      case '+': push(Tok::plus, "+", 1); continue;
      case '-': push(Tok::minus, "-", 1); continue;
      case '*': push(Tok::star, "*", 1); continue;
      case '/': push(Tok::slash, "/", 1); continue;
      case '(': push(Tok::lparen, "(", 1); continue;
      case ')': push(Tok::rparen, ")", 1); continue;
      case ',': push(Tok::comma, ",", 1); continue;
      case '{': push(Tok::lbrace, "{", 1); continue;
      case '}': push(Tok::rbrace, "}", 1); continue;
      case '[': push(Tok::lbracket, "[", 1); continue;
      case ']': push(Tok::rbracket, "]", 1); continue;
      case ';': push(Tok::semicolon, ";", 1); continue;
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + ch + "'", line, col);
  }
  out.push_back({Tok::end, "end of input", line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Linear expressions

struct Linear {
  std::map<std::string, Rational> coeffs;
  Rational constant = 0;

  bool is_constant() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const auto& kv) { return kv.second == 0; });
  }
  Linear& operator+=(const Linear& o) {
    for (const auto& [k, v] : o.coeffs) coeffs[k] += v;
    constant += o.constant;
    return *this;
  }
  Linear& scale(const Rational& s) {
    for (auto& [k, v] : coeffs) v *= s;
    constant *= s;
    return *this;
  }
};

struct RawConstraint {
  Linear lhs_minus_rhs;  // <= 0
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ExponentProgram parse() {
    skip_separators();
    if (peek().kind == Tok::ident && peek().text == "In" && toks_[pos_ + 1].kind == Tok::lbracket) {
      // In[1]:= prefix from a notebook transcript
      throw_at(peek(), "remove the 'In[..]:=' prompt before the Maximize call");
    }
    if (peek().kind == Tok::ident && peek().text == "Maximize" && toks_[pos_ + 1].kind == Tok::lbracket) {
      parse_mathematica();
    } else {
      parse_native();
    }
    return build();
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void throw_at(const Token& t, const std::string& msg) const {
    throw ParseError(msg, t.line, t.column);
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) throw_at(peek(), std::string("expected ") + what + ", found '" + peek().text + "'");
    return advance();
  }
  void skip_separators() {
    while (peek().kind == Tok::newline || peek().kind == Tok::semicolon) ++pos_;
  }
  void skip_newlines() {
    while (peek().kind == Tok::newline) ++pos_;
  }

  void parse_native() {
    while (peek().kind != Tok::end) {
      const Token& head = peek();
      if (head.kind == Tok::ident && head.text == "maximize") {
        advance();
        set_objective(expect(Tok::ident, "objective variable"));
      } else if (head.kind == Tok::ident && head.text == "variables") {
        advance();
        if (declared_) throw_at(head, "duplicate 'variables' directive");
        if (!order_.empty()) throw_at(head, "'variables' must precede constraints");
        declared_ = true;
        do {
          declare(expect(Tok::ident, "variable name"));
        } while (accept(Tok::comma));
      } else {
        parse_conjunction(false);
      }
      if (peek().kind != Tok::end && peek().kind != Tok::newline && peek().kind != Tok::semicolon) {
        throw_at(peek(), "expected end of statement, found '" + peek().text + "'");
      }
      skip_separators();
    }
  }

  void parse_mathematica() {
    advance();  // Maximize
    newline_is_space_ = true;
    expect(Tok::lbracket, "'['");
    expect(Tok::lbrace, "'{'");
    const Token& obj = expect(Tok::ident, "objective variable");
    expect(Tok::comma, "','");
    parse_conjunction(true);
    expect(Tok::rbrace, "'}'");
    expect(Tok::comma, "','");
    expect(Tok::lbrace, "'{'");
    // The variable list fixes the order but constraints are already parsed;
    // record the names and reorder afterwards.
    std::vector<const Token*> vars;
    do {
      vars.push_back(&expect(Tok::ident, "variable name"));
    } while (accept(Tok::comma));
    expect(Tok::rbrace, "'}'");
    expect(Tok::rbracket, "']'");
    skip_separators();
    if (peek().kind != Tok::end) throw_at(peek(), "unexpected input after Maximize[...]");

    std::vector<std::string> ordered;
    for (const Token* t : vars) {
      if (std::find(ordered.begin(), ordered.end(), t->text) != ordered.end()) {
        throw_at(*t, "duplicate variable '" + t->text + "'");
      }
      ordered.push_back(t->text);
    }
    for (const auto& used : order_) {
      if (std::find(ordered.begin(), ordered.end(), used) == ordered.end()) {
        throw_at(*vars.front(), "unknown variable '" + used + "'");
      }
    }
    order_ = ordered;
    declared_ = true;
    set_objective(obj);
  }

  void parse_conjunction(bool mathematica) {
    do {
      if (mathematica) skip_newlines();
      parse_chain();
      if (mathematica) skip_newlines();
    } while (accept(Tok::andand));
  }

  void parse_chain() {
    Linear left = parse_expr();
    if (peek().kind != Tok::le) throw_at(peek(), "expected '<=' in constraint");
    while (accept(Tok::le)) {
      Linear right = parse_expr();
      Linear diff = left;
      diff += Linear(right).scale(-1);
      constraints_.push_back({diff});
      left = std::move(right);
    }
  }

  Linear parse_expr() {
    Linear acc = parse_term();
    for (;;) {
      if (newline_is_space_) skip_newlines();
      if (accept(Tok::plus)) {
        acc += parse_term();
      } else if (accept(Tok::minus)) {
        acc += parse_term().scale(-1);
      } else {
        return acc;
      }
    }
  }

  Linear parse_term() {
    Linear acc = parse_unary();
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::star) {
        advance();
        acc = multiply(acc, parse_unary(), t);
      } else if (t.kind == Tok::slash) {
        advance();
        const Token& at = peek();
        Linear divisor = parse_unary();
        if (!divisor.is_constant()) throw_at(at, "nonlinear term: division by a variable");
        if (divisor.constant == 0) throw_at(at, "division by zero");
        acc.scale(Rational(1) / divisor.constant);
      } else if (t.kind == Tok::ident || t.kind == Tok::lparen || t.kind == Tok::number) {
        // implicit multiplication, as in 3b/4
        acc = multiply(acc, parse_unary(), t);
      } else {
        return acc;
      }
    }
  }

  Linear multiply(const Linear& x, const Linear& y, const Token& at) {
    if (x.is_constant()) return Linear(y).scale(x.constant);
    if (y.is_constant()) return Linear(x).scale(y.constant);
    throw_at(at, "nonlinear term: product of variables");
  }

  Linear parse_unary() {
    if (newline_is_space_) skip_newlines();
    if (accept(Tok::minus)) return parse_unary().scale(-1);
    if (accept(Tok::plus)) return parse_unary();
    const Token& t = peek();
    if (t.kind == Tok::number) {
      advance();
      Linear out;
      out.constant = Rational(BigInt(t.text));
      return out;
    }
    if (t.kind == Tok::ident) {
      advance();
      if (t.text == "maximize" || t.text == "variables") throw_at(t, "'" + t.text + "' is a keyword");
      use(t);
      Linear out;
      out.coeffs[t.text] = 1;
      return out;
    }
    if (accept(Tok::lparen)) {
      Linear inner = parse_expr();
      if (newline_is_space_) skip_newlines();
      expect(Tok::rparen, "')'");
      return inner;
    }
    throw_at(t, "expected a number, variable or '(', found '" + t.text + "'");
  }

  void declare(const Token& t) {
    if (std::find(order_.begin(), order_.end(), t.text) != order_.end()) {
      throw_at(t, "duplicate variable '" + t.text + "'");
    }
    order_.push_back(t.text);
  }

  void use(const Token& t) {
    if (std::find(order_.begin(), order_.end(), t.text) != order_.end()) return;
    if (declared_ && !newline_is_space_) throw_at(t, "unknown variable '" + t.text + "'");
    order_.push_back(t.text);
  }

  void set_objective(const Token& t) {
    if (objective_) throw_at(t, "duplicate 'maximize' directive");
    if (std::find(order_.begin(), order_.end(), t.text) == order_.end()) {
      if (declared_) throw_at(t, "unknown variable '" + t.text + "'");
      order_.push_back(t.text);
    }
    objective_ = t.text;
  }

  ExponentProgram build() {
    if (!objective_) throw_at(peek(), "missing 'maximize <variable>' directive");
    ExponentProgram p;
    p.variables = order_;
    p.objective = *objective_;
    for (const auto& raw : constraints_) {
      Constraint c;
      c.coeffs.assign(order_.size(), Rational(0));
      for (const auto& [name, v] : raw.lhs_minus_rhs.coeffs) c.coeffs[p.variable_index(name)] = v;
      c.rhs = -raw.lhs_minus_rhs.constant;
      p.constraints.push_back(std::move(c));
    }
    return p;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool declared_ = false;
  bool newline_is_space_ = false;
  std::vector<std::string> order_;
  std::optional<std::string> objective_;
  std::vector<RawConstraint> constraints_;
};

// ---------------------------------------------------------------------------
// Exact linear algebra

using Matrix = std::vector<std::vector<Rational>>;

// Solves the square system rows . x = rhs; nullopt when singular.
std::optional<std::vector<Rational>> solve_square(Matrix a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Basis of {x : rows . x = 0}.
std::vector<std::vector<Rational>> null_space(Matrix a, std::size_t n) {
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < a.size(); ++col) {
    std::size_t pivot = row;
    while (pivot < a.size() && a[pivot][col] == 0) ++pivot;
    if (pivot == a.size()) continue;
    std::swap(a[pivot], a[row]);
    const Rational inv = Rational(1) / a[row][col];
    for (auto& v : a[row]) v *= inv;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t k = 0; k < n; ++k) a[r][k] -= f * a[row][k];
    }
    pivot_cols.push_back(col);
    ++row;
  }
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (std::find(pivot_cols.begin(), pivot_cols.end(), free) != pivot_cols.end()) continue;
    std::vector<Rational> v(n, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) v[pivot_cols[i]] = -a[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

bool satisfies(const std::vector<Constraint>& cs, const std::vector<Rational>& x) {
  for (const auto& c : cs) {
    Rational lhs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) lhs += c.coeffs[i] * x[i];
    if (lhs > c.rhs) return false;
  }
  return true;
}

constexpr std::size_t kMaxSubsystems = 5'000'000;

struct VertexSearch {
  bool found = false;
  Rational best;
  std::vector<Rational> witness;
  std::size_t subsystems = 0;
};

// Maximizes x[objective] over the vertices of a pointed polyhedron.
VertexSearch enumerate_vertices(const std::vector<Constraint>& cs, std::size_t n,
                                std::size_t objective) {
  VertexSearch out;
  const std::size_t m = cs.size();
  if (m < n) return out;
  {
    // C(m, n) guard
    double combos = 1.0;
    for (std::size_t i = 0; i < n; ++i) combos = combos * static_cast<double>(m - i) / static_cast<double>(i + 1);
    if (combos > static_cast<double>(kMaxSubsystems)) {
      throw PreconditionError("program too large for vertex enumeration");
    }
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (;;) {
    Matrix a;
    std::vector<Rational> b;
    for (std::size_t i : idx) {
      a.push_back(cs[i].coeffs);
      b.push_back(cs[i].rhs);
    }
    ++out.subsystems;
    if (auto x = solve_square(std::move(a), std::move(b)); x && satisfies(cs, *x)) {
      const Rational& v = (*x)[objective];
      if (!out.found || v > out.best || (v == out.best && *x < out.witness)) {
        out.found = true;
        out.best = v;
        out.witness = *x;
      }
    }
    // next combination
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == m - n + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace

std::size_t ExponentProgram::variable_index(std::string_view name) const {
  const auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) throw PreconditionError("unknown variable '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - variables.begin());
}

std::size_t ExponentProgram::objective_index() const { return variable_index(objective); }

ExponentProgram parse_program(std::string_view text) { return Parser(tokenize(text)).parse(); }

std::string print_program(const ExponentProgram& p) {
  std::ostringstream os;
  os << "variables ";
  for (std::size_t i = 0; i < p.variables.size(); ++i) os << (i ? ", " : "") << p.variables[i];
  os << "\nmaximize " << p.objective << "\n";
  for (const auto& c : p.constraints) {
    bool first = true;
    for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
      const Rational& v = c.coeffs[i];
      if (v == 0) continue;
      const Rational mag = abs(v);
      if (first) {
        os << (v < 0 ? "-" : "");
      } else {
        os << (v < 0 ? " - " : " + ");
      }
      if (mag != 1) os << to_string(mag) << "*";
      os << p.variables[i];
      first = false;
    }
    if (first) os << "0";
    os << " <= " << to_string(c.rhs) << "\n";
  }
  return os.str();
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

bool feasible(const ExponentProgram& program, const std::vector<Rational>& x) {
  if (x.size() != program.variables.size()) return false;
  return satisfies(program.constraints, x);
}

Solution solve(const ExponentProgram& program) {
  const std::size_t n = program.variables.size();
  const std::size_t obj = program.objective_index();
  if (program.constraints.empty()) throw PreconditionError("solve: program has no constraints");
  for (const auto& c : program.constraints) {
    if (c.coeffs.size() != n) throw PreconditionError("solve: constraint width mismatch");
  }

  // Pin the lineality space so the polyhedron has vertices; the objective is
  // constant along it whenever the program is bounded.
  std::vector<Constraint> cs = program.constraints;
  Matrix rows;
  for (const auto& c : cs) rows.push_back(c.coeffs);
  for (auto& dir : null_space(rows, n)) {
    std::vector<Rational> neg(dir);
    for (auto& v : neg) v = -v;
    cs.push_back({dir, Rational(0)});
    cs.push_back({neg, Rational(0)});
  }

  Solution out;
  VertexSearch primal = enumerate_vertices(cs, n, obj);
  out.subsystems = primal.subsystems;
  if (!primal.found) {
    out.status = SolveStatus::infeasible;
    return out;
  }

  // Recession cone {d : A d <= 0} inside the unit box: positive objective
  // there means the program is unbounded.
  std::vector<Constraint> cone;
  for (const auto& c : program.constraints) cone.push_back({c.coeffs, Rational(0)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rational> e(n, Rational(0));
    e[i] = 1;
    cone.push_back({e, Rational(1)});
    e[i] = -1;
    cone.push_back({e, Rational(1)});
  }
  VertexSearch ray = enumerate_vertices(cone, n, obj);
  out.subsystems += ray.subsystems;
  if (ray.found && ray.best > 0) {
    out.status = SolveStatus::unbounded;
    return out;
  }

  out.status = SolveStatus::optimal;
  out.value = primal.best;
  out.witness = primal.witness;
  return out;
}

ExponentProgram chinta_program() {
  ExponentProgram p;
  p.variables = {"gamma", "a", "b", "c"};
  p.objective = "gamma";
  auto r = [](long long num, long long den = 1) { return make_rational(num, den); };
  auto add = [&](Rational g, Rational a, Rational b, Rational c, Rational rhs) {
    p.constraints.push_back({{g, a, b, c}, rhs});
  };
  add(r(1), r(0), r(-1, 2), r(0), r(0));           // gamma - b/2 <= 0
  add(r(1), r(0), r(0), r(1, 2), r(1));            // gamma + c/2 - 1 <= 0
  add(r(0), r(1), r(0), r(-1), r(-1));             // a + 1 <= c
  add(r(0), r(0), r(0), r(1), r(2));               // c <= 2
  add(r(1), r(-3, 8), r(3, 4), r(0), r(1, 16));    // 3b/4 - 3a/8 - 1/16 + gamma <= 0
  add(r(1, 2), r(-3, 8), r(3, 4), r(0), r(0));     // 3b/4 - 3a/8 + gamma/2 <= 0
  add(r(0), r(0), r(-2), r(0), r(0));              // 0 <= 2b
  add(r(0), r(-1), r(2), r(0), r(0));              // 2b <= a
  add(r(0), r(1), r(0), r(0), r(1));               // a <= 1
  return p;
}

std::pair<Rational, Rational> s2_exponent_branches(int k, const Rational& a, const Rational& b,
                                                   const Rational& gamma) {
  if (k < 2) throw PreconditionError("s2_exponent_envelope: k must be an integer > 1");
  const Rational inv_k = make_rational(1, k);
  const Rational common =
      b * (1 - inv_k) - a * (make_rational(1, 2) - inv_k / 2) - inv_k / 4 + gamma / 2;
  return {common + gamma / 2, common + inv_k / 4};
}

Rational s2_exponent_envelope(int k, const Rational& a, const Rational& b, const Rational& gamma) {
  auto [first, second] = s2_exponent_branches(k, a, b, gamma);
  return std::max(first, second);
}

Rational balancing_k(const Rational& gamma) {
  if (gamma <= 0) throw PreconditionError("balancing_k: gamma must be positive");
  return Rational(1) / (2 * gamma);
}

}  // namespace nvtwist::lp
