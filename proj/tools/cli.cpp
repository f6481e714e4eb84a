#include "cli.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "btv/bowtie.hpp"
#include "btv/cascade.hpp"
#include "btv/community.hpp"
#include "btv/error.hpp"
#include "btv/features.hpp"
#include "btv/graph.hpp"
#include "btv/graph_io.hpp"
#include "btv/nullmodel.hpp"
#include "btv/parallel.hpp"
#include "btv/partition.hpp"
#include "btv/rng.hpp"
#include "btv/stability.hpp"

#ifndef BTV_VERSION
#define BTV_VERSION "0.0.0"
#endif

namespace btv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

namespace {

// Stream ids under the master seed.
constexpr std::uint64_t kCommunityStream = 1;
constexpr std::uint64_t kSignificanceStream = 2;
constexpr std::uint64_t kCascadeStream = 3;
constexpr std::uint64_t kSweepStream = 4;
constexpr std::uint64_t kAgreementStream = 5;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Output files and run manifest of one invocation.
class Run {
 public:
  Run(std::string command, fs::path dir, bool overwrite, std::uint64_t seed)
      : command_(std::move(command)), dir_(std::move(dir)), overwrite_(overwrite), seed_(seed) {}

  void input(const std::string& name, const fs::path& path) {
    inputs_.push_back({{"name", name}, {"file", path.filename().string()}, {"sha256", sha256_hex(read_file(path))}});
  }

  json& parameters() { return parameters_; }

  /// Refuses to start when any planned file exists and --overwrite is unset.
  void plan(std::vector<std::string> files) {
    files.push_back("manifest.json");
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    for (const auto& f : files) {
      if (!overwrite_ && fs::exists(dir_ / f)) {
        throw IoError("refusing to overwrite " + (dir_ / f).string() + " (pass --overwrite)");
      }
    }
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
    outputs_.push_back({{"file", name}, {"sha256", sha256_hex(content)}});
    std::cout << "wrote " << path.string() << '\n';
  }

  void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

  void finish() {
    const json manifest = {{"tool", "btv"},
                           {"version", BTV_VERSION},
                           {"command", command_},
                           {"seed", seed_},
                           {"inputs", inputs_},
                           {"parameters", parameters_},
                           {"outputs", outputs_}};
    const auto path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << manifest.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path dir_;
  bool overwrite_;
  std::uint64_t seed_;
  json inputs_ = json::array();
  json parameters_ = json::object();
  json outputs_ = json::array();
};

struct GlobalOptions {
  std::string out;
  bool overwrite = false;
  std::uint64_t seed = 2019;
  int workers = 0;
  std::string log_level = "warn";
};

struct SnapshotOptions {
  std::string nodes;
  std::string edges;
  std::string snapshot = "feb2019";
};

struct PartitionOptions {
  std::string mode = "groups";  // groups | detect | file (| none where allowed)
  std::string file;
  std::size_t trials = 10;
  double damping = 0.85;
  std::size_t min_size = 5;
};

void add_snapshot_options(CLI::App& cmd, SnapshotOptions& o) {
  cmd.add_option("--nodes", o.nodes, "nodes CSV (id,polarity,fans_<label>...)")->required()->check(CLI::ExistingFile);
  cmd.add_option("--edges", o.edges, "edges CSV (source_id,target_id)")->required()->check(CLI::ExistingFile);
  cmd.add_option("--snapshot", o.snapshot, "snapshot label")->capture_default_str();
}

void add_partition_options(CLI::App& cmd, PartitionOptions& o, std::vector<std::string> modes) {
  cmd.add_option("--partition", o.mode, "partition source")->check(CLI::IsMember(modes))->capture_default_str();
  cmd.add_option("--partition-file", o.file, "partition CSV (id,part_label) for --partition file")
      ->check(CLI::ExistingFile);
  cmd.add_option("--trials", o.trials, "community detection trials")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--damping", o.damping, "random-walk damping")->capture_default_str();
  cmd.add_option("--min-size", o.min_size, "parts smaller than this are UNASSIGNED")->capture_default_str();
}

void add_decomposition_option(CLI::App& cmd, std::string& kind) {
  cmd.add_option("--decomposition", kind, "within (vaccination groups) or across (detected communities)")
      ->check(CLI::IsMember({"within", "across"}))
      ->capture_default_str();
}

DirectedGraph load(const SnapshotOptions& o, Run& run, const std::string& tag = "") {
  if (tag.empty()) run.input("nodes", o.nodes);
  run.input("edges" + tag, o.edges);
  const auto labels = read_snapshot_labels(o.nodes);
  for (const auto& label : labels) {
    if (label.name == o.snapshot) return load_snapshot(o.nodes, o.edges, label);
  }
  throw LookupError("snapshot '" + o.snapshot + "' not found in " + o.nodes);
}

json partition_params(const PartitionOptions& o) {
  return {{"partition", o.mode}, {"trials", o.trials}, {"damping", o.damping}, {"min_size", o.min_size}};
}

CommunityResult detect(const DirectedGraph& g, const PartitionOptions& o, std::uint64_t seed) {
  return detect_communities(g, o.trials, derive_seed(seed, {kCommunityStream}), o.damping);
}

/// The partition selected by --partition; nullopt for "none".
std::optional<Partition> choose_partition(const DirectedGraph& g, const PartitionOptions& o, std::uint64_t seed,
                                          Run& run) {
  if (o.mode == "none") return std::nullopt;
  if (o.mode == "groups") return polarity_partition(g);
  if (o.mode == "detect") return detect(g, o, seed).partition;
  if (o.file.empty()) throw ValidationError("--partition file requires --partition-file");
  run.input("partition", o.file);
  return read_partition_csv(o.file);
}

BowtieDecomposition decomposition_of(const DirectedGraph& g, const std::string& kind, const PartitionOptions& o,
                                     std::uint64_t seed, Run& run) {
  PartitionOptions chosen = o;
  chosen.mode = kind == "within" ? "groups" : (o.mode == "file" ? "file" : "detect");
  return recursive_decompose(g, *choose_partition(g, chosen, seed, run), o.min_size);
}

std::map<std::string, std::int64_t> fan_changes(const DirectedGraph& g, const std::string& next) {
  std::map<std::string, std::int64_t> delta;
  for (const auto& node : g.nodes()) delta.emplace(node.id, node.fans_at(next) - node.fans_at(g.snapshot().name));
  return delta;
}

std::map<std::string, std::int64_t> fans_at(const DirectedGraph& g, const std::string& snapshot) {
  std::map<std::string, std::int64_t> fans;
  for (const auto& node : g.nodes()) fans.emplace(node.id, node.fans_at(snapshot));
  return fans;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError("bad multiplier '" + item + "' in --grid");
    grid.push_back(v);
  }
  if (grid.empty()) throw ValidationError("--grid is empty");
  return grid;
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Io: return kExitIo;
    case ErrorCategory::Numerical: return kExitNumerical;
    default: return kExitValidation;
  }
}

void report(std::string_view category, const std::string& message) {
  std::cerr << json{{"error", {{"category", category}, {"message", message}}}}.dump() << '\n';
}

fs::path output_dir(const GlobalOptions& g) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "btv-out";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Bow-tie analysis of directed page recommendation networks", "btv"};
  app.set_version_flag("--version", BTV_VERSION);
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--out", global.out, std::string("output directory (default $") + kOutDirEnv + " or ./btv-out)");
  app.add_flag("--overwrite", global.overwrite, "replace existing output files");
  app.add_option("--seed", global.seed, "master seed")->capture_default_str();
  app.add_option("--workers", global.workers, "OpenMP workers (0 = runtime default)")->capture_default_str();
  app.add_option("--log-level", global.log_level, "trace|debug|info|warn|error|off")->capture_default_str();

  SnapshotOptions snap;
  PartitionOptions part;
  std::string kind = "within";

  auto* ingest = app.add_subcommand("ingest", "load a snapshot, export graph JSON and edge summary");
  add_snapshot_options(*ingest, snap);

  auto* decompose_cmd = app.add_subcommand("decompose", "whole-graph bow-tie roles");
  add_snapshot_options(*decompose_cmd, snap);

  auto* recursive = app.add_subcommand("recursive", "bow-tie roles per part of a partition");
  add_snapshot_options(*recursive, snap);
  add_partition_options(*recursive, part, {"groups", "detect", "file"});

  std::size_t agreement_runs = 0;
  auto* communities = app.add_subcommand("communities", "map-equation community detection");
  add_snapshot_options(*communities, snap);
  communities->add_option("--trials", part.trials, "search trials")->check(CLI::PositiveNumber)->capture_default_str();
  communities->add_option("--damping", part.damping, "random-walk damping")->capture_default_str();
  communities->add_option("--min-size", part.min_size, "collapse threshold")->capture_default_str();
  communities->add_option("--agreement-runs", agreement_runs, "extra runs for the co-assignment matrix")
      ->capture_default_str();

  std::size_t replicas = 1000;
  auto* significance = app.add_subcommand("significance", "configuration-model ranks of bow-tie components");
  add_snapshot_options(*significance, snap);
  add_partition_options(*significance, part, {"none", "groups", "detect", "file"});
  significance->add_option("--replicas", replicas, "null-model replicas")->check(CLI::PositiveNumber)
      ->capture_default_str();

  SirParams sir;
  std::size_t pieces = 1000;
  auto* simulate = app.add_subcommand("simulate", "SIR cascades seeded from SCC, OUT and IN");
  add_snapshot_options(*simulate, snap);
  add_partition_options(*simulate, part, {"detect", "file"});
  add_decomposition_option(*simulate, kind);
  simulate->add_option("--beta", sir.beta, "transmission probability")->capture_default_str();
  simulate->add_option("--gamma", sir.gamma, "recovery probability")->capture_default_str();
  simulate->add_option("--pieces", pieces, "pieces per component")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_flag("--forward", sir.forward, "spread along stored edge direction");
  simulate->add_flag("--weighted", sir.weighted, "weight contact probabilities by edge weight");

  SweepConfig sweep_cfg;
  std::string comp_x = "SCC", comp_y = "OUT", grid = "0.1,0.5,1,2,10", filter = "EXPANDING", next_snapshot;
  auto* sweep = app.add_subcommand("sweep", "initialiser-multiplier heatmap of influence/fan-change correlation");
  add_snapshot_options(*sweep, snap);
  add_partition_options(*sweep, part, {"detect", "file"});
  add_decomposition_option(*sweep, kind);
  sweep->add_option("--comp-x", comp_x, "x-axis component")->capture_default_str();
  sweep->add_option("--comp-y", comp_y, "y-axis component")->capture_default_str();
  sweep->add_option("--grid", grid, "comma-separated multipliers")->capture_default_str();
  sweep->add_option("--n", sweep_cfg.pieces, "pieces per cell")->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_option("--filter", filter, "ALL, EXPANDING or NONEXPANDING")->capture_default_str();
  sweep->add_option("--next-snapshot", next_snapshot, "snapshot whose fans define fan changes")->required();
  sweep->add_option("--beta", sweep_cfg.params.beta, "transmission probability")->capture_default_str();
  sweep->add_option("--gamma", sweep_cfg.params.gamma, "recovery probability")->capture_default_str();
  sweep->add_flag("--forward", sweep_cfg.params.forward, "spread along stored edge direction");
  sweep->add_flag("--weighted", sweep_cfg.params.weighted, "weight contact probabilities by edge weight");

  bool weighted_betweenness = false;
  auto* features = app.add_subcommand("features", "per-page feature table for anti and pro pages");
  add_snapshot_options(*features, snap);
  add_partition_options(*features, part, {"detect", "file"});
  features->add_option("--next-snapshot", next_snapshot, "snapshot whose fans define fan_delta")->required();
  features->add_flag("--weighted-betweenness", weighted_betweenness, "use 1/weight geodesics");

  SnapshotOptions later;
  bool allow_partial = false;
  auto* stability = app.add_subcommand("stability", "role transitions between two snapshots");
  add_snapshot_options(*stability, snap);
  add_partition_options(*stability, part, {"detect", "file"});
  add_decomposition_option(*stability, kind);
  stability->add_option("--edges-later", later.edges, "edges CSV of the later snapshot")->required()
      ->check(CLI::ExistingFile);
  stability->add_option("--snapshot-later", later.snapshot, "later snapshot label")->required();
  stability->add_flag("--allow-partial", allow_partial, "count pages missing from one snapshot instead of failing");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << BTV_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report("validation", e.what());
    return kExitValidation;
  }

  try {
    spdlog::set_level(spdlog::level::from_str(global.log_level));
    set_worker_count(global.workers);
    const auto dir = output_dir(global);
    const std::uint64_t seed = global.seed;
    const auto* cmd = app.get_subcommands().front();
    if ((cmd == simulate || cmd == sweep || cmd == features || cmd == stability) && part.mode == "groups") {
      part.mode = "detect";
    }
    Run run(cmd->get_name(), dir, global.overwrite, seed);
    auto& params = run.parameters();
    params["snapshot"] = snap.snapshot;

    if (cmd == ingest) {
      run.plan({"graph.json", "edge_summary.json"});
      const auto g = load(snap, run);
      run.write_json("graph.json", graph_to_json(g));
      run.write_json("edge_summary.json", edge_summary_to_json(edge_summary(g)));
    } else if (cmd == decompose_cmd) {
      run.plan({"roles.csv", "bowtie_summary.json"});
      const auto g = load(snap, run);
      const auto d = decompose(g);
      run.write("roles.csv", roles_csv(d));
      run.write_json("bowtie_summary.json", decomposition_summary_json(d));
    } else if (cmd == recursive) {
      params.update(partition_params(part));
      run.plan({"roles.csv", "bowtie_summary.json", "partition.csv"});
      const auto g = load(snap, run);
      const auto partition = *choose_partition(g, part, seed, run);
      const auto d = recursive_decompose(g, partition, part.min_size);
      run.write("roles.csv", roles_csv(d));
      run.write_json("bowtie_summary.json", decomposition_summary_json(d));
      run.write("partition.csv", partition_csv(partition));
    } else if (cmd == communities) {
      params.update({{"trials", part.trials},
                     {"damping", part.damping},
                     {"min_size", part.min_size},
                     {"agreement_runs", agreement_runs}});
      run.plan({"partition.csv", "partition_collapsed.csv", "communities.json"});
      const auto g = load(snap, run);
      const auto result = detect(g, part, seed);
      const auto collapsed = collapse_small(result.partition, part.min_size);
      json summary = {{"codelength", result.codelength},
                      {"module_count", result.module_count},
                      {"best_trial", result.best_trial},
                      {"trial_codelengths", result.trial_codelengths},
                      {"unassigned_nodes", collapsed.part_sizes().count(std::string(kUnassignedLabel))
                                               ? collapsed.part_sizes().at(std::string(kUnassignedLabel))
                                               : 0}};
      if (agreement_runs > 0) {
        std::vector<Partition> runs;
        for (std::size_t r = 0; r < agreement_runs; ++r) {
          runs.push_back(detect_communities(g, part.trials, derive_seed(seed, {kAgreementStream, r}), part.damping)
                             .partition);
        }
        summary["unstable_nodes"] = partition_agreement(runs).unstable_nodes();
      }
      run.write("partition.csv", partition_csv(result.partition));
      run.write("partition_collapsed.csv", partition_csv(collapsed));
      run.write_json("communities.json", summary);
    } else if (cmd == significance) {
      params.update(partition_params(part));
      params["replicas"] = replicas;
      run.plan({"ranks.json", "ranks.csv"});
      const auto g = load(snap, run);
      const auto partition = choose_partition(g, part, seed, run);
      const std::uint64_t stream = derive_seed(seed, {kSignificanceStream});
      std::vector<RankReport> reports;
      if (partition) {
        reports = component_rank(g, *partition, replicas, stream, part.min_size);
      } else {
        reports.push_back(component_rank(g, replicas, stream));
      }
      run.write_json("ranks.json", rank_reports_json(reports));
      run.write("ranks.csv", rank_reports_csv(reports));
    } else if (cmd == simulate) {
      params.update(partition_params(part));
      params.update({{"decomposition", kind},
                     {"beta", sir.beta},
                     {"gamma", sir.gamma},
                     {"pieces", pieces},
                     {"forward", sir.forward},
                     {"weighted", sir.weighted}});
      run.plan({"influence_samples.csv", "influence_summary.json"});
      sir.validate();
      const auto g = load(snap, run);
      const auto roles = decomposition_of(g, kind, part, seed, run);
      const auto experiments =
          component_influence_experiment(g, roles, pieces, sir, derive_seed(seed, {kCascadeStream}));
      const auto influence = kind == "within" ? InfluenceKind::Within : InfluenceKind::Across;
      json medians = json::object();
      for (const auto& e : experiments) {
        const auto m = e.median(influence);
        medians[std::string(role_name(e.role))] = {{"eligible_pages", e.eligible_pages},
                                                   {"median", m ? json(*m) : json()}};
      }
      run.write("influence_samples.csv", influence_samples_csv(g, experiments));
      run.write_json("influence_summary.json", {{"influence", influence_kind_name(influence)}, {"components", medians}});
    } else if (cmd == sweep) {
      sweep_cfg.comp_x = parse_role(comp_x);
      sweep_cfg.comp_y = parse_role(comp_y);
      sweep_cfg.multipliers = parse_grid(grid);
      sweep_cfg.filter = parse_page_filter(filter);
      sweep_cfg.kind = kind == "within" ? InfluenceKind::Within : InfluenceKind::Across;
      sweep_cfg.seed = derive_seed(seed, {kSweepStream});
      params.update(partition_params(part));
      params.update({{"decomposition", kind},
                     {"comp_x", comp_x},
                     {"comp_y", comp_y},
                     {"grid", sweep_cfg.multipliers},
                     {"n", sweep_cfg.pieces},
                     {"filter", page_filter_name(sweep_cfg.filter)},
                     {"next_snapshot", next_snapshot},
                     {"beta", sweep_cfg.params.beta},
                     {"gamma", sweep_cfg.params.gamma},
                     {"forward", sweep_cfg.params.forward},
                     {"weighted", sweep_cfg.params.weighted}});
      run.plan({"heatmap.json"});
      const auto g = load(snap, run);
      const auto roles = decomposition_of(g, kind, part, seed, run);
      run.write_json("heatmap.json", sweep_json(sweep_heatmap(g, roles, fan_changes(g, next_snapshot), sweep_cfg)));
    } else if (cmd == features) {
      params.update(partition_params(part));
      params.update({{"next_snapshot", next_snapshot}, {"weighted_betweenness", weighted_betweenness}});
      run.plan({"features.csv", "composition.csv"});
      const auto g = load(snap, run);
      const auto communities_partition = *choose_partition(g, part, seed, run);
      const auto wbt = recursive_decompose(g, polarity_partition(g), part.min_size);
      const auto abt = recursive_decompose(g, communities_partition, part.min_size);
      const auto records =
          extract_features(g, communities_partition, wbt, abt, fans_at(g, next_snapshot), weighted_betweenness);
      run.write("features.csv", features_csv(records));
      run.write("composition.csv", composition_csv(g, degree_composition(g)));
    } else if (cmd == stability) {
      later.nodes = snap.nodes;
      params.update(partition_params(part));
      params.update({{"decomposition", kind}, {"snapshot_later", later.snapshot}, {"allow_partial", allow_partial}});
      run.plan({"sankey.json"});
      const auto g1 = load(snap, run);
      const auto g2 = load(later, run, "_later");
      const auto d1 = decomposition_of(g1, kind, part, seed, run);
      const auto d2 = decomposition_of(g2, kind, part, seed, run);
      run.write_json("sankey.json", sankey_json(role_flow_slices(d1, d2, allow_partial)));
    }
    run.finish();
    return kExitOk;
  } catch (const Error& e) {
    report(category_name(e.category()), e.what());
    return exit_code(e.category());
  } catch (const spdlog::spdlog_ex& e) {
    report("validation", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    report("internal", e.what());
    return kExitInternal;
  }
}

}  // namespace btv::cli
