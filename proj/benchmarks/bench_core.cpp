#include <benchmark/benchmark.h>

#include "nvtwist/characters.hpp"
#include "nvtwist/curve_io.hpp"
#include "nvtwist/exponentlp.hpp"
#include "nvtwist/hecke.hpp"
#include "nvtwist/kloosterman.hpp"
#include "nvtwist/lfunctions.hpp"

namespace {

using namespace nvtwist;

const EllipticCurveForm& curve_32a() {
  static const auto curves = load_curve_file(NVTWIST_BENCH_CURVES);
  return find_curve(curves, "32a");
}

void BM_PrimeModulus(benchmark::State& state) {
  const auto q = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(PrimeModulus::make(q));
}
BENCHMARK(BM_PrimeModulus)->Arg(61)->Arg(1009)->Arg(10007);

void BM_KloostermanTable(benchmark::State& state) {
  const auto m = PrimeModulus::make(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(KloostermanTable(m));
}
BENCHMARK(BM_KloostermanTable)->Arg(61)->Arg(199)->Arg(1009);

void BM_MomentSum(benchmark::State& state) {
  const KloostermanTable table(PrimeModulus::make(1009));
  std::vector<std::uint32_t> rs(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < rs.size(); ++i) rs[i] = static_cast<std::uint32_t>(i + 1);
  for (auto _ : state) benchmark::DoNotOptimize(moment_sum(rs, table));
}
BENCHMARK(BM_MomentSum)->Arg(2)->Arg(4)->Arg(8);

void BM_WeightedMoment(benchmark::State& state) {
  const KloostermanTable table(PrimeModulus::make(31));
  const std::vector<Rational> z(5, Rational(1));
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(weighted_moment_report(z, k, table));
}
BENCHMARK(BM_WeightedMoment)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_CountAp(benchmark::State& state) {
  const auto p = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_ap(curve_32a().model(), p));
}
BENCHMARK(BM_CountAp)->Arg(101)->Arg(10007)->Arg(100003);

void BM_LambdaTable(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    const EllipticCurveForm fresh("32a", curve_32a().model(), 32, 1);
    benchmark::DoNotOptimize(fresh.lambda_table(n));
  }
}
BENCHMARK(BM_LambdaTable)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SolveExponentProgram(benchmark::State& state) {
  const auto program = lp::chinta_program();
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve(program));
}
BENCHMARK(BM_SolveExponentProgram)->Unit(benchmark::kMillisecond);

void BM_DirectLvalue(benchmark::State& state) {
  const DirichletCharacter chi(PrimeModulus::make(static_cast<std::uint64_t>(state.range(0))), 1);
  for (auto _ : state) benchmark::DoNotOptimize(direct_lvalue(curve_32a(), chi));
}
BENCHMARK(BM_DirectLvalue)->Arg(13)->Arg(61)->Unit(benchmark::kMillisecond);

void BM_OrbitMoment(benchmark::State& state) {
  const auto q = static_cast<std::uint64_t>(state.range(0));
  const auto orbit = galois_orbit(character_with_d(PrimeModulus::make(q), 1));
  const AfeParameters params;
  for (auto _ : state) benchmark::DoNotOptimize(orbit_average_moment(curve_32a(), orbit, params));
}
BENCHMARK(BM_OrbitMoment)->Arg(13)->Arg(29)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive is LTO bytecode tied to another compiler build.
BENCHMARK_MAIN();
