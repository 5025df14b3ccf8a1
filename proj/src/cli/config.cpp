#include "gelato/cli/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gelato/errors.hpp"
#include "gelato/text_format.hpp"

namespace gelato::cli {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  if (!text::parse_double(value, out)) bad_value(key, value);
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  if (!text::parse_u64(value, out)) bad_value(key, value);
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt(v[i]);
  }
  return out;
}

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

struct Key {
  std::string name;
  Getter get;
  Setter set;
};

Key path_key(std::string name, std::string ExperimentConfig::*field) {
  return {std::move(name), [field](const ExperimentConfig& c) { return c.*field; },
          [field](ExperimentConfig& c, std::string_view v) { c.*field = std::string(v); }};
}

template <class Obj>
Key double_key(std::string name, Obj obj) {
  const std::string k = name;
  return {std::move(name),
          [obj](const ExperimentConfig& c) {
            return text::format_double(obj(const_cast<ExperimentConfig&>(c)));
          },
          [obj, k](ExperimentConfig& c, std::string_view v) { obj(c) = to_double(k, v); }};
}

template <class T, class Obj>
Key uint_key(std::string name, Obj obj) {
  const std::string k = name;
  return {std::move(name),
          [obj](const ExperimentConfig& c) {
            return std::to_string(obj(const_cast<ExperimentConfig&>(c)));
          },
          [obj, k](ExperimentConfig& c, std::string_view v) {
            const std::uint64_t x = to_u64(k, v);
            if (x > std::numeric_limits<T>::max()) bad_value(k, v);
            obj(c) = static_cast<T>(x);
          }};
}

std::string mode_text(const ExperimentConfig& c) { return mode_name(c); }

void set_mode(ExperimentConfig& c, std::string_view v) {
  c.heuristic = HeuristicKind::kCn;
  if (v == "gelato") {
    c.mode = Mode::kGelato;
  } else if (v == "ac-only") {
    c.mode = Mode::kAcOnly;
  } else if (v == "mlp-only") {
    c.mode = Mode::kMlpOnly;
  } else if (v == "cos-ac") {
    c.mode = Mode::kCosAc;
  } else if (v == "mlp-ac-two-stage") {
    c.mode = Mode::kMlpAcTwoStage;
  } else if (v.starts_with("heuristic:")) {
    const std::string_view h = v.substr(10);
    c.mode = Mode::kHeuristic;
    if (h == "cn") {
      c.heuristic = HeuristicKind::kCn;
    } else if (h == "aa") {
      c.heuristic = HeuristicKind::kAa;
    } else if (h == "ra") {
      c.heuristic = HeuristicKind::kRa;
    } else if (h == "cos") {
      c.heuristic = HeuristicKind::kCos;
    } else {
      bad_value("mode", v);
    }
  } else {
    bad_value("mode", v);
  }
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back(path_key("edges", &ExperimentConfig::edges));
    t.push_back(path_key("attributes", &ExperimentConfig::attributes));
    t.push_back(path_key("split", &ExperimentConfig::split_file));
    t.push_back(path_key("checkpoint", &ExperimentConfig::checkpoint));
    t.push_back(path_key("history", &ExperimentConfig::history));
    t.push_back(path_key("report", &ExperimentConfig::report));
    t.push_back(path_key("pr_csv", &ExperimentConfig::pr_csv));
    t.push_back(path_key("scores_csv", &ExperimentConfig::scores_csv));
    t.push_back(path_key("weights_csv", &ExperimentConfig::weights_csv));
    t.push_back({"mode", mode_text, set_mode});

    t.push_back(double_key("ratio_train", [](ExperimentConfig& c) -> double& { return c.ratios.train; }));
    t.push_back(double_key("ratio_valid", [](ExperimentConfig& c) -> double& { return c.ratios.valid; }));
    t.push_back(double_key("ratio_test", [](ExperimentConfig& c) -> double& { return c.ratios.test; }));
    t.push_back(uint_key<std::uint64_t>(
        "split_seed", [](ExperimentConfig& c) -> std::uint64_t& { return c.split_seed; }));

    t.push_back(double_key("eta", [](ExperimentConfig& c) -> double& { return c.enhancer.eta; }));
    t.push_back(double_key("alpha", [](ExperimentConfig& c) -> double& { return c.enhancer.alpha; }));
    t.push_back(double_key("beta", [](ExperimentConfig& c) -> double& { return c.enhancer.beta; }));
    t.push_back({"self_loops",
                 [](const ExperimentConfig& c) -> std::string {
                   return c.enhancer.self_loop_mode == SelfLoopMode::kAll ? "all" : "isolated";
                 },
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "all") {
                     c.enhancer.self_loop_mode = SelfLoopMode::kAll;
                   } else if (v == "isolated") {
                     c.enhancer.self_loop_mode = SelfLoopMode::kIsolatedOnly;
                   } else {
                     bad_value("self_loops", v);
                   }
                 }});
    t.push_back(double_key("self_loop_weight",
                           [](ExperimentConfig& c) -> double& { return c.enhancer.self_loop_weight; }));
    t.push_back(uint_key<std::size_t>(
        "hidden", [](ExperimentConfig& c) -> std::size_t& { return c.enhancer.hidden; }));

    t.push_back({"loss",
                 [](const ExperimentConfig& c) -> std::string {
                   return c.trainer.loss == LossKind::kNPair ? "npair" : "bce";
                 },
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "npair") {
                     c.trainer.loss = LossKind::kNPair;
                   } else if (v == "bce") {
                     c.trainer.loss = LossKind::kBce;
                   } else {
                     bad_value("loss", v);
                   }
                 }});
    t.push_back({"regime",
                 [](const ExperimentConfig& c) -> std::string {
                   return c.trainer.regime == Regime::kUnbiased ? "unbiased" : "biased";
                 },
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "unbiased") {
                     c.trainer.regime = Regime::kUnbiased;
                   } else if (v == "biased") {
                     c.trainer.regime = Regime::kBiased;
                   } else {
                     bad_value("regime", v);
                   }
                 }});
    t.push_back(double_key("lr", [](ExperimentConfig& c) -> double& { return c.trainer.lr; }));
    t.push_back(uint_key<std::size_t>(
        "epochs", [](ExperimentConfig& c) -> std::size_t& { return c.trainer.epochs; }));
    t.push_back(uint_key<std::size_t>(
        "batch_count", [](ExperimentConfig& c) -> std::size_t& { return c.trainer.batch_count; }));
    t.push_back(uint_key<std::size_t>(
        "neg_cap", [](ExperimentConfig& c) -> std::size_t& { return c.trainer.neg_cap; }));
    t.push_back(double_key("dropout", [](ExperimentConfig& c) -> double& { return c.trainer.dropout; }));
    t.push_back(uint_key<unsigned>("t", [](ExperimentConfig& c) -> unsigned& { return c.trainer.ac_t; }));
    t.push_back(uint_key<std::uint64_t>(
        "seed", [](ExperimentConfig& c) -> std::uint64_t& { return c.trainer.seed; }));
    t.push_back(uint_key<std::uint64_t>("valid_neg_sample", [](ExperimentConfig& c) -> std::uint64_t& {
      return c.trainer.valid_neg_sample;
    }));

    t.push_back({"eval_phase",
                 [](const ExperimentConfig& c) -> std::string { return phase_name(c.eval_phase); },
                 [](ExperimentConfig& c, std::string_view v) {
                   if (v == "test") {
                     c.eval_phase = Phase::kTest;
                   } else if (v == "valid") {
                     c.eval_phase = Phase::kValid;
                   } else {
                     bad_value("eval_phase", v);
                   }
                 }});
    t.push_back({"prec",
                 [](const ExperimentConfig& c) {
                   return join(c.prec, [](double f) { return text::format_double(f); });
                 },
                 [](ExperimentConfig& c, std::string_view v) {
                   c.prec.clear();
                   for (std::string_view w : words(v)) {
                     const double f = to_double("prec", w);
                     if (!(f > 0.0 && f <= 1.0)) bad_value("prec", w);
                     c.prec.push_back(f);
                   }
                 }});
    t.push_back({"hits",
                 [](const ExperimentConfig& c) {
                   return join(c.hits, [](std::uint64_t k) { return std::to_string(k); });
                 },
                 [](ExperimentConfig& c, std::string_view v) {
                   c.hits.clear();
                   for (std::string_view w : words(v)) {
                     const std::uint64_t k = to_u64("hits", w);
                     if (k == 0) bad_value("hits", w);
                     c.hits.push_back(k);
                   }
                 }});
    t.push_back(uint_key<std::uint64_t>("biased_neg_per_pos", [](ExperimentConfig& c) -> std::uint64_t& {
      return c.biased_neg_per_pos;
    }));
    t.push_back(uint_key<std::uint64_t>(
        "eval_seed", [](ExperimentConfig& c) -> std::uint64_t& { return c.eval_seed; }));
    t.push_back({"export_nodes",
                 [](const ExperimentConfig& c) {
                   return join(c.export_nodes, [](NodeId u) { return std::to_string(u); });
                 },
                 [](ExperimentConfig& c, std::string_view v) {
                   c.export_nodes.clear();
                   for (std::string_view w : words(v)) {
                     const std::uint64_t u = to_u64("export_nodes", w);
                     if (u > std::numeric_limits<NodeId>::max()) bad_value("export_nodes", w);
                     c.export_nodes.push_back(static_cast<NodeId>(u));
                   }
                 }});
    t.push_back(uint_key<std::uint64_t>("export_max_nodes", [](ExperimentConfig& c) -> std::uint64_t& {
      return c.export_max_nodes;
    }));
    t.push_back(uint_key<unsigned>("workers", [](ExperimentConfig& c) -> unsigned& { return c.workers; }));
    return t;
  }();
  return table;
}

const Key& find_key(std::string_view name) {
  for (const Key& k : key_table()) {
    if (k.name == name) return k;
  }
  throw ConfigError("unknown config key: " + std::string(name));
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key& k : key_table()) out.push_back(k.name);
  return out;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  find_key(key).set(cfg, text::trim(value));
}

std::string get_config_value(const ExperimentConfig& cfg, std::string_view key) {
  return find_key(key).get(cfg);
}

void apply_config(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = text::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    set_config_value(cfg, text::trim(s.substr(0, eq)), text::trim(s.substr(eq + 1)));
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  apply_config(cfg, in);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  for (const Key& k : key_table()) out << k.name << " = " << k.get(cfg) << '\n';
}

std::string mode_name(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case Mode::kGelato: return "gelato";
    case Mode::kAcOnly: return "ac-only";
    case Mode::kMlpOnly: return "mlp-only";
    case Mode::kCosAc: return "cos-ac";
    case Mode::kMlpAcTwoStage: return "mlp-ac-two-stage";
    case Mode::kHeuristic:
      switch (cfg.heuristic) {
        case HeuristicKind::kCn: return "heuristic:cn";
        case HeuristicKind::kAa: return "heuristic:aa";
        case HeuristicKind::kRa: return "heuristic:ra";
        case HeuristicKind::kCos: return "heuristic:cos";
      }
  }
  return "gelato";
}

bool mode_is_trained(Mode mode) {
  return mode == Mode::kGelato || mode == Mode::kMlpOnly || mode == Mode::kMlpAcTwoStage;
}

bool mode_needs_attributes(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case Mode::kAcOnly: return false;
    case Mode::kHeuristic: return cfg.heuristic == HeuristicKind::kCos;
    default: return true;
  }
}

}  // namespace gelato::cli
