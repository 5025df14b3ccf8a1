#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gelato/enhancer.hpp"
#include "gelato/local_heuristics.hpp"
#include "gelato/split.hpp"
#include "gelato/trainer.hpp"

namespace gelato::cli {

// gelato         trained MLP weights + cosine + topology, scored by AC
// ac-only        AC on the observed graph (no attributes)
// mlp-only       MLP trained directly on pair scores, used as the scorer
// cos-ac         enhanced graph without the MLP (beta forced to 0), scored by AC
// mlp-ac-two-stage  MLP trained directly, then plugged into the enhanced graph
// heuristic:X    cn | aa | ra | cos
enum class Mode { kGelato, kAcOnly, kMlpOnly, kCosAc, kMlpAcTwoStage, kHeuristic };

enum class HeuristicKind { kCn, kAa, kRa, kCos };

struct ExperimentConfig {
  // Paths; empty when unset.
  std::string edges;
  std::string attributes;
  std::string split_file;
  std::string checkpoint;
  std::string history;
  std::string report;
  std::string pr_csv;
  std::string scores_csv;
  std::string weights_csv;

  Mode mode = Mode::kGelato;
  HeuristicKind heuristic = HeuristicKind::kCn;

  SplitRatios ratios;
  std::uint64_t split_seed = 0;

  EnhancerConfig enhancer;
  TrainConfig trainer;

  Phase eval_phase = Phase::kTest;
  std::vector<double> prec{1.0};
  std::vector<std::uint64_t> hits{100, 1000};
  std::uint64_t biased_neg_per_pos = 0;  // 0 = unbiased evaluation
  std::uint64_t eval_seed = 0;
  std::vector<NodeId> export_nodes;
  std::uint64_t export_max_nodes = 1000;
  unsigned workers = 0;  // 0 = available parallelism

  bool operator==(const ExperimentConfig&) const = default;
};

// Names of all keys, in serialization order.
std::vector<std::string> config_keys();

// Sets one key from its text value. Throws ConfigError on an unknown key or
// an unparsable value.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const ExperimentConfig& cfg, std::string_view key);

// "key = value" lines; '#' starts a comment; blank lines ignored. List values
// are space separated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_config(ExperimentConfig& cfg, std::istream& in);
void write_config(std::ostream& out, const ExperimentConfig& cfg);

std::string mode_name(const ExperimentConfig& cfg);
bool mode_is_trained(Mode mode);
bool mode_needs_attributes(const ExperimentConfig& cfg);

}  // namespace gelato::cli
