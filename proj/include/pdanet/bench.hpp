#pragma once

// Wall-time scaling of the two colorers: the greedy distance-2 colorer and
// inference of the pointer model, over square placements of growing size.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdanet/neural.hpp"
#include "pdanet/seqcodec.hpp"

namespace pdanet::bench {

struct BenchInstance {
  std::size_t k = 1;
  std::size_t f = 1;
  std::size_t z = 1;
  AdjacencyMatrix adjacency;
  std::size_t edges() const { return adjacency.ones(); }
};

/// K = F = n, Z = floor(n/2), cyclic stars; n is chosen so that the edge
/// count n * ceil(n/2) is closest to the target. A target of 0 yields a
/// single fully cached cell.
BenchInstance square_instance(std::size_t target_edges);

struct BenchRow {
  std::size_t edges = 0;
  std::size_t k = 0;
  std::size_t f = 0;
  std::size_t greedy_colors = 0;
  double greedy_ms = 0.0;
  double neural_ms = 0.0;
};

struct BenchOptions {
  double min_time_ms = 20.0;  ///< repeat each measurement until this much time has passed
  int rounds = 3;             ///< keep the fastest round
  std::uint64_t seed = 1;
};

/// When `model` is missing or its vocabulary is too small for an instance, a
/// seeded model of the same shape and a large enough vocabulary is timed instead.
std::vector<BenchRow> run_bench(const std::vector<std::size_t>& target_edges,
                                const std::optional<neural::ModelParams>& model, const BenchOptions& options);

/// Least-squares slope of log(time) against log(edges), ignoring rows with a
/// zero edge count or time.
double fit_exponent(const std::vector<BenchRow>& rows, bool neural);

/// Header: edges,k,f,greedy_colors,greedy_ms,neural_ms
std::string format_bench_csv(const std::vector<BenchRow>& rows);

}  // namespace pdanet::bench
