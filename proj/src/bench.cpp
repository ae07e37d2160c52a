#include "pdanet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "pdanet/graph.hpp"
#include "pdanet/placement.hpp"

namespace pdanet::bench {

namespace {

template <typename Fn>
double time_ms(Fn&& fn, const BenchOptions& options) {
  using Clock = std::chrono::steady_clock;
  double best = INFINITY;
  for (int round = 0; round < std::max(1, options.rounds); ++round) {
    const auto t0 = Clock::now();
    std::size_t reps = 0;
    double elapsed = 0.0;
    do {
      fn();
      ++reps;
      elapsed = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    } while (elapsed < options.min_time_ms);
    best = std::min(best, elapsed / static_cast<double>(reps));
  }
  return best;
}

BipartiteColoredGraph graph_of(const AdjacencyMatrix& a) {
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    for (std::size_t f = 0; f < a.rows(); ++f) {
      if (a.is_one(f, k)) edges.push_back({k, f, std::nullopt});
    }
  }
  return {a.cols(), a.rows(), std::move(edges)};
}

}  // namespace

BenchInstance square_instance(std::size_t target_edges) {
  BenchInstance inst;
  if (target_edges == 0) {
    inst.adjacency = placement_to_adjacency(1, 1, 1, cyclic_star_pattern(1, 1, 1));
    return inst;
  }
  std::size_t best_n = 1;
  std::size_t best_gap = SIZE_MAX;
  for (std::size_t n = 1; n * ((n + 1) / 2) <= 4 * target_edges + 4; ++n) {
    const std::size_t e = n * ((n + 1) / 2);
    const std::size_t gap = e > target_edges ? e - target_edges : target_edges - e;
    if (gap < best_gap) {
      best_gap = gap;
      best_n = n;
    }
  }
  inst.k = inst.f = best_n;
  inst.z = best_n / 2;
  inst.adjacency = placement_to_adjacency(inst.z, inst.f, inst.k, cyclic_star_pattern(inst.k, inst.f, inst.z));
  return inst;
}

std::vector<BenchRow> run_bench(const std::vector<std::size_t>& target_edges,
                                const std::optional<neural::ModelParams>& model, const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (std::size_t target : target_edges) {
    const BenchInstance inst = square_instance(target);
    BenchRow row;
    row.edges = inst.edges();
    row.k = inst.k;
    row.f = inst.f;

    const BipartiteColoredGraph g = graph_of(inst.adjacency);
    row.greedy_colors = greedy_strong_color(g).color_count();
    row.greedy_ms = time_ms([&] { (void)greedy_strong_color(g); }, options);

    neural::ModelConfig config = model ? model->config : neural::ModelConfig{};
    const bool fits = model && static_cast<std::size_t>(config.max_rows) >= inst.f &&
                      static_cast<std::size_t>(config.max_cols) >= inst.k;
    neural::ModelParams params;
    if (fits) {
      params = *model;
    } else {
      config.max_rows = std::max<int>(config.max_rows, static_cast<int>(inst.f));
      config.max_cols = std::max<int>(config.max_cols, static_cast<int>(inst.k));
      config.seed = options.seed;
      params = neural::ModelParams::init(config);
    }
    const neural::RolloutOptions ro{neural::DecodeMode::Greedy, false, options.seed, false};
    row.neural_ms = time_ms([&] { (void)neural::rollout(inst.adjacency, params, ro); }, options);
    rows.push_back(row);
  }
  return rows;
}

double fit_exponent(const std::vector<BenchRow>& rows, bool neural) {
  std::vector<std::pair<double, double>> pts;
  for (const BenchRow& r : rows) {
    const double t = neural ? r.neural_ms : r.greedy_ms;
    if (r.edges > 0 && t > 0.0) pts.emplace_back(std::log(static_cast<double>(r.edges)), std::log(t));
  }
  if (pts.size() < 2) return 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::string format_bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "edges,k,f,greedy_colors,greedy_ms,neural_ms\n";
  char buf[160];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.6f,%.6f\n", r.edges, r.k, r.f, r.greedy_colors, r.greedy_ms,
                  r.neural_ms);
    out += buf;
  }
  return out;
}

}  // namespace pdanet::bench
