#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nvtwist/characters.hpp"
#include "nvtwist/curve_io.hpp"
#include "nvtwist/errors.hpp"
#include "nvtwist/exponentlp.hpp"
#include "nvtwist/kloosterman.hpp"
#include "nvtwist/lfunctions.hpp"
#include "nvtwist/report_io.hpp"

namespace nvtwist::cli {

namespace {

#ifndef NVTWIST_DEFAULT_CURVES
#define NVTWIST_DEFAULT_CURVES "curves.txt"
#endif

/// Everything a subcommand needs; flags override the optional config file.
struct RunConfig {
  std::string curve_file = NVTWIST_DEFAULT_CURVES;
  std::string curve = "32a";
  std::vector<std::uint64_t> q_list;
  std::string q_range;
  std::uint64_t d = 0;
  std::uint64_t order_floor = 0;
  std::string b = "7/26";
  std::string a = "19/26";
  std::string c = "45/26";
  double tail_tolerance = 1e-10;
  double truncation_factor = 1.0;
  std::string format = "json";
  std::string output;
  unsigned threads = 1;
};

Rational rational_flag(const std::string& text, const char* name) {
  auto r = parse_rational(text);
  if (!r) throw PreconditionError(std::string("--") + name + ": not a rational: " + text);
  return *r;
}

AfeParameters afe_parameters(const RunConfig& cfg) {
  AfeParameters p;
  p.b = rational_flag(cfg.b, "b");
  p.a = rational_flag(cfg.a, "a");
  p.c = rational_flag(cfg.c, "c");
  p.tail_tolerance = cfg.tail_tolerance;
  p.truncation_factor = cfg.truncation_factor;
  p.validate();
  return p;
}

std::vector<std::uint64_t> primes_in(const std::string& range) {
  const auto colon = range.find(':');
  if (colon == std::string::npos) throw PreconditionError("--q-range expects LO:HI");
  const auto lo = std::stoull(range.substr(0, colon));
  const auto hi = std::stoull(range.substr(colon + 1));
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = std::max<std::uint64_t>(lo, 3); q <= hi; ++q) {
    if (is_prime(q)) out.push_back(q);
  }
  return out;
}

unsigned env_threads() {
  if (const char* env = std::getenv("NVTWIST_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

void emit(const RunConfig& cfg, std::ostream& out, const std::vector<std::string>& lines,
          const std::string& csv_header = {}) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) throw PreconditionError("cannot open output file " + cfg.output);
    sink = &file;
  }
  if (cfg.format == "csv" && !csv_header.empty()) *sink << csv_header << "\n";
  for (const auto& l : lines) *sink << l << "\n";
}

std::string csv_join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  return out;
}

// --- subcommands -----------------------------------------------------------

void cmd_chi_av(const RunConfig& cfg, std::uint64_t q, std::int64_t n_opt, std::ostream& out) {
  auto modulus = PrimeModulus::make(q);
  const GaloisOrbit orbit = galois_orbit(character_with_d(modulus, cfg.d));
  std::vector<std::int64_t> ns;
  if (n_opt > 0) {
    ns.push_back(n_opt);
  } else {
    for (std::int64_t n = 1; n < static_cast<std::int64_t>(q); ++n) ns.push_back(n);
  }
  std::vector<std::string> lines;
  for (std::int64_t n : ns) {
    const Rational exact = chi_av_formula(n, *modulus, cfg.d);
    const Complex brute = chi_av_bruteforce(orbit, n);
    const double diff = std::abs(brute - to_double(exact));
    if (cfg.format == "csv") {
      lines.push_back(csv_join({std::to_string(q), std::to_string(cfg.d), std::to_string(n),
                                to_string(exact), format_double(to_double(exact)),
                                format_double(brute.real()), format_double(brute.imag()),
                                format_double(diff)}));
    } else {
      lines.push_back(JsonLine()
                          .add("q", q)
                          .add("d", cfg.d)
                          .add("n", n)
                          .add("formula", to_string(exact))
                          .add("formula_value", to_double(exact))
                          .add("brute_re", brute.real())
                          .add("brute_im", brute.imag())
                          .add("abs_diff", diff)
                          .str());
    }
  }
  emit(cfg, out, lines, "q,d,n,formula,formula_value,brute_re,brute_im,abs_diff");
}

void cmd_kloosterman(const RunConfig& cfg, std::uint64_t q, std::int64_t a, std::int64_t b,
                     std::ostream& out) {
  auto modulus = PrimeModulus::make(q);
  const KloostermanTable table(modulus);
  const double value = table(a, b);
  if (cfg.format == "csv") {
    emit(cfg, out, {csv_join({std::to_string(q), std::to_string(a), std::to_string(b), format_double(value)})},
         "q,a,b,value");
  } else {
    emit(cfg, out, {JsonLine().add("q", q).add("a", a).add("b", b).add("value", value).str()});
  }
}

std::vector<std::uint32_t> parse_list(const std::string& text, const char* flag) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw PreconditionError(std::string("--") + flag + ": not an integer list: " + text);
    }
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

void cmd_moment(const RunConfig& cfg, std::uint64_t q, const std::string& rs_text, bool check,
                std::ostream& out) {
  auto modulus = PrimeModulus::make(q);
  const auto rs = parse_list(rs_text, "rs");
  if (rs.empty() || rs.size() % 2 != 0) throw PreconditionError("--rs needs an even number of residues");
  for (auto r : rs) {
    if (r == 0 || r >= q) throw PreconditionError("--rs entries must lie in 1..q-1");
  }
  const KloostermanTable table(modulus);
  const double value = moment_sum(rs, table);
  JsonLine line;
  std::string rs_json = "[";
  for (std::size_t i = 0; i < rs.size(); ++i) rs_json += (i ? "," : "") + std::to_string(rs[i]);
  rs_json += "]";
  line.add("q", q).add_raw("rs", rs_json).add("k", static_cast<std::uint64_t>(rs.size() / 2));
  line.add("moment", moment_sum_integer(rs, table)).add("value", value).add("in_D", in_D(rs));
  if (check) {
    // Independent path: every Kloosterman sum evaluated term by term.
    Complex direct{0.0, 0.0};
    for (std::uint32_t h = 1; h < q; ++h) {
      Complex prod{1.0, 0.0};
      for (auto r : rs) prod *= kloosterman_direct(h, r, *modulus);
      direct += prod;
    }
    line.add("direct_re", direct.real()).add("direct_im", direct.imag());
    line.add("abs_diff", std::abs(direct - value));
  }
  emit(cfg, out, {line.str()});
}

void cmd_weighted_moment(const RunConfig& cfg, std::uint64_t q, std::size_t r_len, int k,
                 const std::string& weights, std::ostream& out) {
  auto modulus = PrimeModulus::make(q);
  std::vector<Rational> z;
  if (!weights.empty()) {
    std::stringstream ss(weights);
    for (std::string item; std::getline(ss, item, ',');) z.push_back(rational_flag(item, "weights"));
  } else if (cfg.d != 0) {
    for (std::size_t r = 1; r <= r_len; ++r) {
      z.push_back(chi_av_or_zero(static_cast<std::int64_t>(r), *modulus, cfg.d));
    }
  } else {
    z.assign(r_len, Rational(1));
  }
  const KloostermanTable table(modulus);
  const WeightedMomentReport rep = weighted_moment_report(z, k, table);
  emit(cfg, out,
       {JsonLine()
            .add("q", q)
            .add("k", k)
            .add("R", static_cast<std::uint64_t>(rep.R))
            .add("L1", to_string(rep.l1()))
            .add("diagonal", to_string(rep.diagonal))
            .add("off_diagonal", to_string(rep.off_diagonal))
            .add("total", to_string(rep.total))
            .add("split_exact", rep.split_exact())
            .add("diagonal_tuples", rep.diagonal_tuples)
            .add("off_diagonal_tuples", rep.off_diagonal_tuples)
            .add("diagonal_bound", rep.diagonal_bound)
            .add("off_diagonal_bound", rep.off_diagonal_bound)
            .add("diagonal_ratio", rep.diagonal_ratio)
            .add("off_diagonal_ratio", rep.off_diagonal_ratio)
            .add("max_off_diagonal_moment_ratio", rep.max_off_diagonal_moment_ratio)
            .str()});
}

void cmd_lvalue(const RunConfig& cfg, std::uint64_t q, std::uint64_t t, std::ostream& out) {
  const auto curves = load_curve_file(cfg.curve_file);
  const EllipticCurveForm& form = find_curve(curves, cfg.curve);
  const AfeParameters params = afe_parameters(cfg);
  auto modulus = PrimeModulus::make(q);
  const DirichletCharacter chi(modulus, t);
  if (chi.is_trivial()) throw PreconditionError("--t must select a non-trivial character");
  const Complex l = direct_lvalue(form, chi, params.tail_tolerance, params.truncation_factor);
  const Complex m = mollifier_value(form, chi, params.mollifier_length(q));
  const Complex afe = mollified_afe(form, chi, params);
  const Complex eps = root_number(form, chi);
  emit(cfg, out,
       {JsonLine()
            .add("curve", form.label())
            .add("q", q)
            .add("t", static_cast<std::uint64_t>(chi.index()))
            .add("order", chi.order())
            .add("d", chi.d())
            .add("L_re", l.real())
            .add("L_im", l.imag())
            .add("abs_L", std::abs(l))
            .add("M_re", m.real())
            .add("M_im", m.imag())
            .add("LM_re", (l * m).real())
            .add("LM_im", (l * m).imag())
            .add("afe_re", afe.real())
            .add("afe_im", afe.imag())
            .add("root_number_re", eps.real())
            .add("root_number_im", eps.imag())
            .str()});
}

void cmd_scan(const RunConfig& cfg, std::ostream& out) {
  const auto curves = load_curve_file(cfg.curve_file);
  const EllipticCurveForm& form = find_curve(curves, cfg.curve);
  const AfeParameters params = afe_parameters(cfg);
  std::vector<std::uint64_t> qs = cfg.q_list;
  if (!cfg.q_range.empty()) {
    const auto extra = primes_in(cfg.q_range);
    qs.insert(qs.end(), extra.begin(), extra.end());
  }
  std::vector<ScanRecord> rows;
  if (cfg.d != 0) {
    // a single orbit per modulus
    for (std::uint64_t q : qs) {
      if ((q - 1) % cfg.d != 0) throw PreconditionError("--d must divide q-1 for every q");
      auto part = nonvanishing_scan(form, {q}, (q - 1) / cfg.d, params, cfg.threads);
      for (auto& r : part) {
        if (!r.report || r.report->d == cfg.d) rows.push_back(std::move(r));
      }
    }
  } else {
    rows = nonvanishing_scan(form, qs, cfg.order_floor, params, cfg.threads);
  }
  std::vector<std::string> lines;
  for (const auto& r : rows) lines.push_back(cfg.format == "csv" ? scan_record_csv(r) : scan_record_json(r));
  emit(cfg, out, lines, csv_join(moment_csv_header()));
}

int cmd_optimize(const RunConfig& cfg, const std::string& file, bool builtin, std::ostream& out) {
  lp::ExponentProgram program;
  if (builtin) {
    program = lp::chinta_program();
  } else {
    if (file.empty()) throw PreconditionError("optimize needs a program file or --builtin-chinta");
    std::ifstream in(file);
    if (!in) throw PreconditionError("cannot open " + file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    program = lp::parse_program(buffer.str());
  }
  const lp::Solution sol = lp::solve(program);
  JsonLine line;
  line.add("status", lp::to_string(sol.status));
  if (sol.status == lp::SolveStatus::optimal) {
    JsonLine witness, decimal;
    for (std::size_t i = 0; i < program.variables.size(); ++i) {
      witness.add(program.variables[i], to_string(sol.witness[i]));
      decimal.add(program.variables[i], to_double(sol.witness[i]));
    }
    line.add("objective", program.objective)
        .add("value", to_string(sol.value))
        .add("value_decimal", to_double(sol.value))
        .add_raw("witness", witness.str())
        .add_raw("witness_decimal", decimal.str());
  }
  line.add("subsystems", static_cast<std::uint64_t>(sol.subsystems));
  emit(cfg, out, {line.str()});
  return sol.status == lp::SolveStatus::optimal ? kExitOk : kExitInvalid;
}

void cmd_envelope(const RunConfig& cfg, int k, const std::string& a, const std::string& b,
                  const std::string& gamma, std::ostream& out) {
  const Rational ra = rational_flag(a, "a"), rb = rational_flag(b, "b"), rg = rational_flag(gamma, "gamma");
  const auto [first, second] = lp::s2_exponent_branches(k, ra, rb, rg);
  const Rational env = lp::s2_exponent_envelope(k, ra, rb, rg);
  emit(cfg, out,
       {JsonLine()
            .add("k", k)
            .add("branch_gamma", to_string(first))
            .add("branch_k", to_string(second))
            .add("envelope", to_string(env))
            .add("envelope_decimal", to_double(env))
            .str()});
}

void cmd_curves(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::string> lines;
  for (const auto& c : load_curve_file(cfg.curve_file)) {
    const auto& m = c.model();
    lines.push_back(JsonLine()
                        .add("label", c.label())
                        .add("a1", m.a1)
                        .add("a2", m.a2)
                        .add("a3", m.a3)
                        .add("a4", m.a4)
                        .add("a6", m.a6)
                        .add("conductor", c.conductor())
                        .add("epsilon", c.epsilon())
                        .str());
  }
  emit(cfg, out, lines);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted central values, Galois-orbit moments and Kloosterman sums at prime moduli"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_config("--config", "", "TOML/INI file with option defaults; flags take precedence");

  RunConfig cfg;
  cfg.threads = env_threads();
  app.add_option("--curves", cfg.curve_file, "Curve table file")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads (default: NVTWIST_THREADS or 1)");

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--output,-o", cfg.output, "Write to this file instead of stdout");
  };
  auto add_afe = [&](CLI::App* sub) {
    sub->add_option("--curve", cfg.curve, "Curve label")->capture_default_str();
    sub->add_option("--b", cfg.b, "Mollifier exponent, X = q^b")->capture_default_str();
    sub->add_option("--a", cfg.a, "Balance exponent, Y = q^a")->capture_default_str();
    sub->add_option("--c", cfg.c, "S1 split exponent")->capture_default_str();
    sub->add_option("--tail-tolerance", cfg.tail_tolerance)->capture_default_str();
    sub->add_option("--truncation-factor", cfg.truncation_factor)->capture_default_str();
  };

  std::uint64_t q = 0;
  std::int64_t n = 0, ka = 0, kb = 0;
  std::string rs, weights, file, env_a, env_b, env_gamma;
  bool check = false, builtin = false;
  std::size_t r_len = 0;
  int k = 0;
  std::uint64_t t = 1;

  auto* chi_av = app.add_subcommand("chi-av", "Orbit average chi_av: closed form vs brute force");
  chi_av->add_option("--q", q, "Prime modulus")->required();
  chi_av->add_option("--d", cfg.d, "Character order is (q-1)/d")->required();
  chi_av->add_option("--n", n, "Single residue (default: all of 1..q-1)");
  add_format(chi_av);

  auto* kloos = app.add_subcommand("kloosterman", "Kloosterman sum S(a,b,q)");
  kloos->add_option("--q", q)->required();
  kloos->add_option("--a", ka)->required();
  kloos->add_option("--b", kb)->required();
  add_format(kloos);

  auto* moment = app.add_subcommand("moment", "sum over h of S(h,r_1,q)...S(h,r_2k,q)");
  moment->add_option("--q", q)->required();
  moment->add_option("--rs", rs, "Comma-separated residues r_1..r_2k")->required();
  moment->add_flag("--check", check, "Also evaluate every Kloosterman sum term by term");
  add_format(moment);

  auto* weighted = app.add_subcommand("weighted-moment", "Weighted 2k-fold Kloosterman moment with the D split");
  weighted->add_option("--q", q)->required();
  weighted->add_option("--k", k)->required();
  weighted->add_option("--R", r_len, "Weights z_1..z_R (all 1 unless --weights or --d)");
  weighted->add_option("--weights", weights, "Comma-separated rational weights");
  weighted->add_option("--d", cfg.d, "Use z_r = chi_av(r) for the orbit with this d");
  add_format(weighted);

  auto* lvalue = app.add_subcommand("lvalue", "Central value of one twist");
  lvalue->add_option("--q", q)->required();
  lvalue->add_option("--t", t, "Character index against the smallest primitive root")->capture_default_str();
  add_afe(lvalue);
  add_format(lvalue);

  auto* scan = app.add_subcommand("scan", "Orbit moments and non-vanishing counts, JSON lines");
  scan->add_option("--q", cfg.q_list, "Prime moduli (repeatable)");
  scan->add_option("--q-range", cfg.q_range, "All primes in LO:HI");
  scan->add_option("--order-floor", cfg.order_floor, "Only orbits of at least this order");
  scan->add_option("--d", cfg.d, "Only the orbit of order (q-1)/d");
  add_afe(scan);
  add_format(scan);

  auto* optimize = app.add_subcommand("optimize", "Exact LP over exponent variables");
  optimize->add_option("file", file, "Program file (native or Maximize[...] syntax)");
  optimize->add_flag("--builtin-chinta", builtin, "Solve the built-in exponent system");
  add_format(optimize);

  auto* envelope = app.add_subcommand("envelope", "S2 exponent for a given k");
  envelope->add_option("--k", k)->required();
  envelope->add_option("--a", env_a)->required();
  envelope->add_option("--b", env_b)->required();
  envelope->add_option("--gamma", env_gamma)->required();
  add_format(envelope);

  auto* curves = app.add_subcommand("curves", "List the curve table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*chi_av) cmd_chi_av(cfg, q, n, out);
    else if (*kloos) cmd_kloosterman(cfg, q, ka, kb, out);
    else if (*moment) cmd_moment(cfg, q, rs, check, out);
    else if (*weighted) {
      if (r_len == 0 && weights.empty()) throw PreconditionError("weighted-moment needs --R or --weights");
      cmd_weighted_moment(cfg, q, r_len, k, weights, out);
    } else if (*lvalue) cmd_lvalue(cfg, q, t, out);
    else if (*scan) cmd_scan(cfg, out);
    else if (*optimize) return cmd_optimize(cfg, file, builtin, out);
    else if (*envelope) cmd_envelope(cfg, k, env_a, env_b, env_gamma, out);
    else if (*curves) cmd_curves(cfg, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace nvtwist::cli
