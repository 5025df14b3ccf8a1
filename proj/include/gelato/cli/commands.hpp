#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gelato/cli/config.hpp"
#include "gelato/scorer.hpp"

namespace gelato::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

// Entry point of the command-line tool. Subcommands:
//   split | train | eval | baseline | export-scores
// Every config key is also a flag (underscores become dashes); flags win
// over --config. Primary outputs go to files named in the config or to
// `out`; diagnostics and timings go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_split(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_train(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_eval(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_baseline(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_export_scores(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

// The scorer a mode ranks with on the observed edges of cfg.eval_phase,
// plus the weighted graph it runs on when there is one.
struct Model {
  std::unique_ptr<PairScorer> scorer;
  std::optional<Graph> graph;
};
Model build_model(const ExperimentConfig& cfg, const Graph& g, const EdgeSplit& split);

}  // namespace gelato::cli
