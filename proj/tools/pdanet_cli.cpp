// pdanet: construct, verify and learn placement delivery arrays.
//
// Exit codes: 0 success, 1 domain failure, 2 input or parse error,
// 3 training failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdanet/bench.hpp"
#include "pdanet/cachesim.hpp"
#include "pdanet/checkpoint.hpp"
#include "pdanet/error.hpp"
#include "pdanet/graph.hpp"
#include "pdanet/neural.hpp"
#include "pdanet/pda.hpp"
#include "pdanet/pda_io.hpp"
#include "pdanet/placement.hpp"
#include "pdanet/random.hpp"
#include "pdanet/seqcodec.hpp"
#include "pdanet/train.hpp"

using namespace pdanet;
using json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kInput = 2;
constexpr int kTraining = 3;

// Output formats have no comment syntax, so run metadata goes to a sidecar.
void write_meta(const std::string& path, const std::string& command, std::uint64_t seed, json config) {
  json meta;
  meta["command"] = command;
  meta["seed"] = seed;
  meta["config"] = std::move(config);
  write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

void require_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw InvalidParameter("no such file: " + path);
}

void require_parent(const std::string& path) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw InvalidParameter("output directory does not exist: " + parent.string());
  }
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string path;
};

int cmd_verify(const VerifyArgs& a) {
  require_file(a.path);
  const PdaText parsed = read_pda_file(a.path);
  const VerifyReport report = verify(parsed.grid, parsed.z, parsed.s);
  std::cout << report.str();
  if (!report.str().empty() && report.str().back() != '\n') std::cout << '\n';
  return report.valid ? kOk : kDomain;
}

// ---------------------------------------------------------------- construct

struct ConstructArgs {
  std::size_t k = 3;
  std::size_t t = 1;
  std::string out;
  std::string graph_out;
};

int cmd_construct(const ConstructArgs& a) {
  require_parent(a.out);
  require_parent(a.graph_out);
  const Pda p = construct_mn_pda(a.k, a.t);
  const RateReport r = rate(p);
  json config{{"K", a.k}, {"t", a.t}};
  if (a.out.empty()) {
    std::cout << format_pda_text(p);
  } else {
    write_pda_file(a.out, p);
    write_meta(a.out, "construct", 0, config);
  }
  if (!a.graph_out.empty()) {
    write_text_file(a.graph_out, format_graph_json(pda_to_graph(p)));
    write_meta(a.graph_out, "construct", 0, config);
  }
  std::cerr << "K=" << p.k() << " F=" << p.f() << " Z=" << p.z() << " S=" << p.s()
            << " rate=" << r.delivery_rate.str() << " M/N=" << r.memory_ratio.str() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- pipeline

struct PipelineArgs {
  std::size_t k = 3;
  std::size_t f = 3;
  std::size_t z = 1;
  std::uint64_t seed = 1;
  std::string colorer = "greedy";
  std::string order = "lex";
  std::string checkpoint;
  bool mask = true;
  std::size_t n_files = 0;
  std::size_t trials = 16;
  std::string out;
  std::string summary;
};

int cmd_pipeline(const PipelineArgs& a) {
  if (a.colorer == "neural") {
    if (a.checkpoint.empty()) throw InvalidParameter("--checkpoint is required for the neural colorer");
    require_file(a.checkpoint);
  }
  require_parent(a.out);
  require_parent(a.summary);
  if (a.k == 0 || a.f == 0 || a.z > a.f) throw InvalidParameter("need K >= 1, F >= 1 and Z <= F");

  const AdjacencyMatrix adj = placement_to_adjacency(a.z, a.f, a.k, default_star_pattern(a.k, a.f, a.z));
  Grid array;
  if (a.colorer == "greedy") {
    std::vector<Edge> edges;
    for (const EdgePos& e : extract_edge_sequence(adj)) edges.push_back({e.col, e.row, std::nullopt});
    const BipartiteColoredGraph g(a.k, a.f, std::move(edges));
    const auto policy = a.order == "shuffled" ? EdgeOrderPolicy::Shuffled : EdgeOrderPolicy::Lexicographic;
    const BipartiteColoredGraph colored = greedy_strong_color(g, policy, a.seed);
    array = Grid(a.f, a.k);
    for (const Edge& e : colored.edges()) array.at(e.f, e.k) = Entry::color(*e.color);
    array = canonicalize(array);
  } else {
    const neural::ModelParams params = neural::load_checkpoint(a.checkpoint);
    const neural::Episode ep =
        neural::rollout(adj, params, {neural::DecodeMode::Greedy, a.mask, a.seed});
    array = ep.array;
  }

  const json config{{"K", a.k},         {"F", a.f},           {"Z", a.z},
                    {"colorer", a.colorer}, {"order", a.order}, {"mask", a.mask},
                    {"checkpoint", a.checkpoint}, {"N", a.n_files ? a.n_files : a.k}, {"trials", a.trials}};
  const VerifyReport report = verify(array, a.z);
  if (!a.out.empty()) {
    write_pda_file(a.out, array);
    write_meta(a.out, "pipeline", a.seed, config);
  } else {
    std::cout << format_pda_text(array);
  }
  if (!report.valid) {
    std::cerr << report.str();
    return kDomain;
  }

  const Pda p = Pda::from_grid(array, a.z);
  const cachesim::Measurement m = cachesim::measure(p, a.n_files ? a.n_files : a.k, a.trials, a.seed);
  std::string csv = "K,F,Z,S,colorer,delivery_rate,uncoded_rate,all_decoded,seed\n";
  csv += std::to_string(p.k()) + "," + std::to_string(p.f()) + "," + std::to_string(p.z()) + "," +
         std::to_string(p.s()) + "," + a.colorer + "," + m.delivery_rate.str() + "," + m.uncoded_rate.str() + "," +
         (m.all_decoded ? "1" : "0") + "," + std::to_string(a.seed) + "\n";
  if (a.summary.empty()) {
    std::cerr << csv;
  } else {
    write_text_file(a.summary, csv);
    write_meta(a.summary, "pipeline", a.seed, config);
  }
  return m.all_decoded ? kOk : kDomain;
}

// ---------------------------------------------------------------- augment

struct AugmentArgs {
  std::vector<std::string> sources;
  std::vector<std::string> mn;  // "K,t"
  std::string delta = "random";
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_augment(const AugmentArgs& a) {
  for (const auto& s : a.sources) require_file(s);
  require_parent(a.out);

  std::vector<Pda> pool;
  for (const auto& s : a.sources) pool.push_back(to_pda(read_pda_file(s)));
  for (const auto& spec : a.mn) {
    std::size_t k = 0;
    std::size_t t = 0;
    if (std::sscanf(spec.c_str(), "%zu,%zu", &k, &t) != 2) throw InvalidParameter("--mn expects K,t: " + spec);
    pool.push_back(construct_mn_pda(k, t));
  }
  std::optional<std::size_t> fixed_delta;
  if (a.delta != "random") fixed_delta = std::stoul(a.delta);

  struct Source {
    BipartiteColoredGraph graph;
    std::size_t degree;
  };
  std::vector<Source> usable;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::size_t degree = pool[i].f() - pool[i].z();
    const bool ok = fixed_delta ? (*fixed_delta >= 1 && *fixed_delta < degree) : degree >= 2;
    if (!ok) {
      std::cerr << "warning: skipping source " << i + 1 << " (degree " << degree << " admits no delta)\n";
      continue;
    }
    usable.push_back({pda_to_graph(pool[i]), degree});
  }
  if (usable.empty() && a.count > 0) throw InvalidParameter("no source admits subsampling");

  std::vector<TrainingPair> corpus;
  Rng rng(a.seed);
  for (std::size_t i = 0; i < a.count; ++i) {
    const Source& src = usable[rng.index(usable.size())];
    const std::size_t delta = fixed_delta ? *fixed_delta : 1 + rng.index(src.degree - 1);
    const Pda p = graph_to_pda(subsample(src.graph, delta, derive_seed(a.seed, i + 1)));
    if (!verify(p.grid(), p.z(), p.s()).valid) throw InvalidPda("subsampled array failed verification");
    corpus.push_back(make_training_pair(p));
  }

  const std::string text = format_corpus(corpus);
  json sources = json::array();
  for (const auto& s : a.sources) sources.push_back(s);
  const json config{{"sources", sources}, {"mn", a.mn}, {"delta", a.delta}, {"count", a.count}};
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(a.out, text);
    write_meta(a.out, "augment", a.seed, config);
  }
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string corpus;
  std::string out;
  std::string log;
  neural::TrainConfig config;
};

int cmd_train(TrainArgs a) {
  require_file(a.corpus);
  require_parent(a.out);
  require_parent(a.log);
  const std::vector<TrainingPair> corpus = parse_corpus(read_text_file(a.corpus));
  int rows = 1;
  int cols = 1;
  for (const TrainingPair& p : corpus) {
    rows = std::max(rows, static_cast<int>(p.f));
    cols = std::max(cols, static_cast<int>(p.k));
  }
  a.config.model.max_rows = std::max(a.config.model.max_rows, rows);
  a.config.model.max_cols = std::max(a.config.model.max_cols, cols);
  a.config.model.seed = a.config.seed;

  const auto& c = a.config;
  const json config{{"hidden", c.model.hidden},
                    {"embed", c.model.embed},
                    {"max_rows", c.model.max_rows},
                    {"max_cols", c.model.max_cols},
                    {"attention_window", c.model.attention_window},
                    {"supervised_epochs", c.supervised_epochs},
                    {"reinforce_epochs", c.reinforce_epochs},
                    {"learning_rate", c.learning_rate},
                    {"reinforce_learning_rate", c.reinforce_learning_rate},
                    {"batch_size", c.batch_size},
                    {"clip_norm", c.clip_norm},
                    {"holdout_fraction", c.holdout_fraction},
                    {"mask_in_reinforce", c.mask_in_reinforce},
                    {"reward_baseline", c.reward_baseline},
                    {"corpus", a.corpus}};

  auto emit = [&](const neural::ModelParams& params, const std::vector<neural::LogRow>& log) {
    if (!a.out.empty()) {
      neural::save_checkpoint(a.out, params);
      write_meta(a.out, "train", c.seed, config);
    }
    const std::string csv = neural::format_log_csv(log);
    if (a.log.empty()) {
      std::cout << csv;
    } else {
      write_text_file(a.log, csv);
      write_meta(a.log, "train", c.seed, config);
    }
  };
  try {
    const neural::TrainResult result = neural::train(corpus, a.config);
    emit(result.params, result.log);
    const auto& last = result.log.back();
    std::cerr << "final loss " << last.loss << ", held-out valid rate " << last.valid_rate << "\n";
    return kOk;
  } catch (const neural::DivergenceError& e) {
    emit(e.last_good(), e.log());
    std::cerr << "error: " << e.what() << "\n";
    return kTraining;
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string pda;
  std::size_t n_files = 0;
  std::size_t trials = 16;
  bool all_demands = false;
  std::size_t packet_bytes = 64;
  std::uint64_t seed = 1;
  std::string transcript;
  std::string trace;
};

int cmd_simulate(const SimulateArgs& a) {
  require_file(a.pda);
  require_parent(a.transcript);
  require_parent(a.trace);
  const Pda p = to_pda(read_pda_file(a.pda));
  const std::size_t n = a.n_files ? a.n_files : p.k();
  const cachesim::Measurement m = a.all_demands ? cachesim::measure_all_demands(p, n, a.seed, a.packet_bytes)
                                                : cachesim::measure(p, n, a.trials, a.seed, a.packet_bytes);
  const json config{{"pda", a.pda},          {"N", n}, {"trials", m.trials.size()}, {"all_demands", a.all_demands},
                    {"packet_bytes", a.packet_bytes}};
  if (!a.transcript.empty() && !m.trials.empty()) {
    const auto lib = cachesim::FileLibrary::random(n, p.f(), a.packet_bytes, a.seed);
    write_text_file(a.transcript, cachesim::format_transcript_json(cachesim::deliver(p, lib, m.trials.front().demand)));
    write_meta(a.transcript, "simulate", a.seed, config);
  }
  if (!a.trace.empty()) {
    write_text_file(a.trace, cachesim::format_demand_trace_csv(m.trials));
    write_meta(a.trace, "simulate", a.seed, config);
  }
  std::cout << "delivery_rate=" << m.delivery_rate.str() << " uncoded_rate=" << m.uncoded_rate.str()
            << " trials=" << m.trials.size() << " all_decoded=" << (m.all_decoded ? 1 : 0) << "\n";
  return m.all_decoded ? kOk : kDomain;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::size_t> sizes{64, 128, 256, 512, 1024, 2048, 4096};
  std::string checkpoint;
  double min_time_ms = 20.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  if (!a.checkpoint.empty()) require_file(a.checkpoint);
  require_parent(a.out);
  std::optional<neural::ModelParams> model;
  if (!a.checkpoint.empty()) model = neural::load_checkpoint(a.checkpoint);
  const auto rows = bench::run_bench(a.sizes, model, {a.min_time_ms, 3, a.seed});
  const std::string csv = bench::format_bench_csv(rows);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_text_file(a.out, csv);
    write_meta(a.out, "bench", a.seed, {{"sizes", a.sizes}, {"checkpoint", a.checkpoint}, {"min_time_ms", a.min_time_ms}});
  }
  std::fprintf(stderr, "greedy exponent %.3f, neural exponent %.3f\n", bench::fit_exponent(rows, false),
               bench::fit_exponent(rows, true));
  return kOk;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInput;
  } catch (const MalformedGrid& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const InvalidParameter& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const ShapeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const VocabularyError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const InvalidBatch& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct, verify and learn placement delivery arrays for coded caching"};
  app.require_subcommand(1);
  int code = kOk;

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Check a PDA text file; exit 0 iff it is a PDA");
  verify_cmd->add_option("path", va.path, "PDA text file")->required();
  verify_cmd->callback([&] { code = guarded([&] { return cmd_verify(va); }); });

  ConstructArgs ca;
  auto* construct_cmd = app.add_subcommand("construct", "Write the Maddah-Ali--Niesen PDA for K users and t = KM/N");
  construct_cmd->add_option("-K,--users", ca.k, "number of users K")->required();
  construct_cmd->add_option("-t,--t", ca.t, "cache parameter t in [1, K-1]")->required();
  construct_cmd->add_option("-o,--out", ca.out, "PDA text output (stdout if omitted)");
  construct_cmd->add_option("--graph-out", ca.graph_out, "also write the colored bipartite graph as JSON");
  construct_cmd->callback([&] { code = guarded([&] { return cmd_construct(ca); }); });

  PipelineArgs pa;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Placement, coloring, verification and simulated delivery");
  pipeline_cmd->add_option("-K,--users", pa.k, "users K")->required();
  pipeline_cmd->add_option("-F,--packets", pa.f, "packets per file F")->required();
  pipeline_cmd->add_option("-Z,--cached", pa.z, "cached packets per user Z")->required();
  pipeline_cmd->add_option("--seed", pa.seed, "random seed")->capture_default_str();
  pipeline_cmd->add_option("--colorer", pa.colorer, "greedy or neural")
      ->check(CLI::IsMember({"greedy", "neural"}))
      ->capture_default_str();
  pipeline_cmd->add_option("--order", pa.order, "greedy edge order: lex or shuffled")
      ->check(CLI::IsMember({"lex", "shuffled"}))
      ->capture_default_str();
  pipeline_cmd->add_option("--checkpoint", pa.checkpoint, "model checkpoint for the neural colorer");
  pipeline_cmd->add_flag("--mask,!--no-mask", pa.mask, "restrict neural pointers to compatible colors");
  pipeline_cmd->add_option("-N,--files", pa.n_files, "library size N (default K)");
  pipeline_cmd->add_option("--trials", pa.trials, "random demand vectors to simulate")->capture_default_str();
  pipeline_cmd->add_option("-o,--out", pa.out, "PDA text output (stdout if omitted)");
  pipeline_cmd->add_option("--summary", pa.summary, "summary CSV output (stderr if omitted)");
  pipeline_cmd->callback([&] { code = guarded([&] { return cmd_pipeline(pa); }); });

  AugmentArgs aa;
  auto* augment_cmd = app.add_subcommand("augment", "Build a training corpus by subsampling valid PDAs");
  augment_cmd->add_option("--source", aa.sources, "PDA text files to subsample");
  augment_cmd->add_option("--mn", aa.mn, "MN source given as K,t (repeatable)");
  augment_cmd->add_option("--delta", aa.delta, "edges kept per user, or 'random' for uniform in [1, degree-1]")
      ->capture_default_str();
  augment_cmd->add_option("--count", aa.count, "pairs to emit")->capture_default_str();
  augment_cmd->add_option("--seed", aa.seed, "random seed")->capture_default_str();
  augment_cmd->add_option("-o,--out", aa.out, "corpus JSONL output (stdout if omitted)");
  augment_cmd->callback([&] { code = guarded([&] { return cmd_augment(aa); }); });

  TrainArgs ta;
  auto& tc = ta.config;
  auto* train_cmd = app.add_subcommand("train", "Supervised pretraining then REINFORCE fine-tuning");
  train_cmd->add_option("--corpus", ta.corpus, "corpus JSONL from augment")->required();
  train_cmd->add_option("-o,--out", ta.out, "checkpoint output");
  train_cmd->add_option("--log", ta.log, "training log CSV (stdout if omitted)");
  train_cmd->add_option("--supervised-epochs", tc.supervised_epochs)->capture_default_str();
  train_cmd->add_option("--reinforce-epochs", tc.reinforce_epochs)->capture_default_str();
  train_cmd->add_option("--lr", tc.learning_rate, "supervised learning rate")->capture_default_str();
  train_cmd->add_option("--rl-lr", tc.reinforce_learning_rate, "REINFORCE learning rate")->capture_default_str();
  train_cmd->add_option("--batch", tc.batch_size)->capture_default_str();
  train_cmd->add_option("--clip", tc.clip_norm, "gradient norm bound")->capture_default_str();
  train_cmd->add_option("--hidden", tc.model.hidden)->capture_default_str();
  train_cmd->add_option("--embed", tc.model.embed)->capture_default_str();
  train_cmd->add_option("--window", tc.model.attention_window, "attention window")->capture_default_str();
  train_cmd->add_option("--holdout", tc.holdout_fraction, "held-out fraction")->capture_default_str();
  train_cmd->add_flag("--mask-in-reinforce", tc.mask_in_reinforce, "mask pointers during REINFORCE rollouts");
  train_cmd->add_flag("--baseline", tc.reward_baseline, "subtract a moving reward baseline");
  train_cmd->add_flag("--wall-time", tc.record_wall_time, "record wall_ms (makes logs non-reproducible)");
  train_cmd->add_option("--threads", tc.threads, "rollout threads")->capture_default_str();
  train_cmd->add_option("--seed", tc.seed, "random seed")->capture_default_str();
  train_cmd->callback([&] { code = guarded([&] { return cmd_train(ta); }); });

  SimulateArgs sa;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run placement and delivery for a PDA and check decoding");
  simulate_cmd->add_option("pda", sa.pda, "PDA text file")->required();
  simulate_cmd->add_option("-N,--files", sa.n_files, "library size N (default K)");
  simulate_cmd->add_option("--trials", sa.trials, "random demand vectors")->capture_default_str();
  simulate_cmd->add_flag("--all-demands", sa.all_demands, "enumerate every demand vector instead");
  simulate_cmd->add_option("--packet-bytes", sa.packet_bytes)->capture_default_str();
  simulate_cmd->add_option("--seed", sa.seed, "random seed")->capture_default_str();
  simulate_cmd->add_option("--transcript", sa.transcript, "JSON transcript of the first trial");
  simulate_cmd->add_option("--trace", sa.trace, "per-user decode trace CSV");
  simulate_cmd->callback([&] { code = guarded([&] { return cmd_simulate(sa); }); });

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Time greedy and neural coloring against the edge count");
  bench_cmd->add_option("--sizes", ba.sizes, "target edge counts")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--checkpoint", ba.checkpoint, "model to time (a seeded model otherwise)");
  bench_cmd->add_option("--min-time-ms", ba.min_time_ms, "minimum time per measurement")->capture_default_str();
  bench_cmd->add_option("--seed", ba.seed, "random seed")->capture_default_str();
  bench_cmd->add_option("-o,--out", ba.out, "CSV output (stdout if omitted)");
  bench_cmd->callback([&] { code = guarded([&] { return cmd_bench(ba); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }
  return code;
}
