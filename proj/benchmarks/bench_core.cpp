#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flagcert/automaton.hpp"
#include "flagcert/domains.hpp"
#include "flagcert/dynamics.hpp"
#include "flagcert/linalg.hpp"

using namespace flagcert;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(-10, 10);
  Matrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = u(rng);
  return m;
}

struct Schottky {
  GroupPresentation pres{2};
  std::optional<GammaGraph> graph;
  std::optional<CompatibleSystem> system;

  Schottky() {
    pres.set_free_model(true);
    const Matrix g = Matrix::from_rows({{3.0, 0.0}, {0.0, 1.0 / 3.0}});
    const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
    const Matrix rot = Matrix::from_rows({{c, -s}, {s, c}});
    pres.add_generator("g", g);
    pres.add_generator("h", rot * g * inverse(rot));
    const char* words[] = {"g", "g^-1", "h", "h^-1"};
    const double angle[] = {0.0, std::numbers::pi / 2, std::numbers::pi / 4, 3 * std::numbers::pi / 4};
    std::vector<GraphVertex> vertices;
    std::vector<ProperDomain> domains;
    for (int i = 0; i < 4; ++i) {
      vertices.push_back({words[i], SingletonLabel{pres.parse(words[i])}});
      domains.push_back(ProperDomain::fs_ball(ProjPoint{std::cos(angle[i]), std::sin(angle[i])}, 0.3));
    }
    std::vector<GraphEdge> edges;
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        if (b != (a ^ 1)) edges.push_back({a, b});
    graph.emplace(pres, vertices, edges, 0.01);
    system.emplace(std::move(domains));
  }
};

}  // namespace

static void BM_Svd(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Matrix m = random_matrix(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(svd(m));
}
BENCHMARK(BM_Svd)->Arg(2)->Arg(4)->Arg(8)->Arg(20);

static void BM_ExteriorPowerGap(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Matrix m = random_matrix(rng, 5);
  for (auto _ : state) benchmark::DoNotOptimize(simple_root_gaps(cartan_projection(exterior_power(m, 2))));
}
BENCHMARK(BM_ExteriorPowerGap);

static void BM_ZimmerMetricSampled(benchmark::State& state) {
  const ProperDomain omega =
      ProperDomain::polytope(ProjHyperplane{0, 0, 1}, {{-1, -1}, {2, -1}, {1.5, 1.2}, {-0.8, 1.5}, {-1.4, 0.2}});
  const ProjPoint x{0.1, 0.2, 1}, y{0.7, -0.3, 1};
  const auto budget = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zimmer_metric(omega, x, y, budget));
}
BENCHMARK(BM_ZimmerMetricSampled)->Arg(1000)->Arg(10000);

static void BM_ZimmerMetricExact(benchmark::State& state) {
  const ProperDomain omega = ProperDomain::chart_ball(ProjHyperplane{0, 0, 1}, {0, 0}, 1.0);
  const Vec x{0.1, 0.2, 1}, y{0.7, -0.3, 1};
  for (auto _ : state) benchmark::DoNotOptimize(zimmer_metric_exact(omega, x, y));
}
BENCHMARK(BM_ZimmerMetricExact);

static void BM_VerifyCompatibility(benchmark::State& state) {
  const Schottky s;
  CertifyOptions options;
  options.budget = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_compatibility(*s.graph, *s.system, s.pres, options));
}
BENCHMARK(BM_VerifyCompatibility)->Arg(64)->Arg(256)->Arg(1024);

static void BM_LimitSetSample(benchmark::State& state) {
  const Schottky s;
  for (auto _ : state) benchmark::DoNotOptimize(limit_set_sample(*s.graph, s.pres, *s.system, 20, 100, 7));
}
BENCHMARK(BM_LimitSetSample);

BENCHMARK_MAIN();
