// Command-line driver: run single scenarios, sweep seed batches, answer
// prefix-search queries against a stabilized trie, and check state dumps.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shpt/corruption.hpp"
#include "shpt/rng.hpp"
#include "shpt/runner.hpp"
#include "shpt/search.hpp"
#include "shpt/state_io.hpp"

using namespace shpt;
using nlohmann::json;

namespace {

constexpr int kExitBadInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitOracleMismatch = 3;

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::set<BitLabel> load_keys_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open keys file: " + path);
  std::set<BitLabel> keys;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    auto label = BitLabel::parse(line.substr(start));
    if (!label)
      throw BadInput(path + ":" + std::to_string(lineno) + ": not a binary string");
    if (!keys.insert(*label).second)
      throw BadInput(path + ":" + std::to_string(lineno) + ": duplicate key");
  }
  if (keys.empty()) throw BadInput(path + ": no keys");
  return keys;
}

std::set<BitLabel> make_random_keys(int count, int key_len, std::uint64_t seed) {
  if (count < 1) throw BadInput("--random-keys must be >= 1");
  if (key_len < 1 || key_len > BitLabel::kMaxBits) throw BadInput("--key-len out of range");
  if (static_cast<double>(count) > (1ull << std::min(key_len, 20)))
    throw BadInput("--random-keys larger than the label space");
  Rng rng(splitmix64(seed ^ 0x6e75ull));
  std::set<BitLabel> keys;
  while (static_cast<int>(keys.size()) < count) keys.insert(rng.label(1, key_len));
  return keys;
}

CorruptionScript load_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open script file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw BadInput(path + ": " + std::string(e.what()));
  }
  CorruptionScript script;
  script.seed = j.value("seed", std::uint64_t{0});
  script.genesis = j.value("genesis", false);
  for (const auto& op : j.value("ops", json::array())) {
    auto name = op.at("op").get<std::string>();
    auto kind = corruption_op_from_name(name);
    if (!kind) throw BadInput(path + ": unknown op " + name);
    script.ops.emplace_back(*kind, op.at("count").get<int>());
  }
  return script;
}

struct ScenarioOptions {
  std::string keys_file;
  int random_keys = 0;
  int key_len = 12;
  std::uint64_t seed = 1;
  std::string corruption = "medium";
  std::string script_file;
  std::size_t max_rounds = 10000;
  std::size_t peers = 8;
};

void add_scenario_flags(CLI::App* cmd, ScenarioOptions& opt) {
  cmd->add_option("--keys-file", opt.keys_file, "keys file, one binary string per line");
  cmd->add_option("--random-keys", opt.random_keys, "number of random keys to generate");
  cmd->add_option("--key-len", opt.key_len, "maximum random key length")->capture_default_str();
  cmd->add_option("--seed", opt.seed, "scenario seed")->capture_default_str();
  cmd->add_option("--corruption", opt.corruption,
                  "corruption level: none|low|medium|high|strip|genesis")
      ->capture_default_str();
  cmd->add_option("--script", opt.script_file, "corruption script file (overrides --corruption)");
  cmd->add_option("--max-rounds", opt.max_rounds, "round cap")->capture_default_str();
  cmd->add_option("--peers", opt.peers, "number of peers")->capture_default_str();
}

std::set<BitLabel> resolve_keys(const ScenarioOptions& opt) {
  if (!opt.keys_file.empty() && opt.random_keys > 0)
    throw BadInput("--keys-file and --random-keys are mutually exclusive");
  if (!opt.keys_file.empty()) return load_keys_file(opt.keys_file);
  if (opt.random_keys > 0) return make_random_keys(opt.random_keys, opt.key_len, opt.seed);
  throw BadInput("need --keys-file or --random-keys");
}

CorruptionScript resolve_script(const ScenarioOptions& opt) {
  if (!opt.script_file.empty()) return load_script_file(opt.script_file);
  return CorruptionScript::level(opt.corruption, splitmix64(opt.seed ^ 0xc09ull));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw BadInput("cannot write " + path);
  out << text << "\n";
}

int cmd_run(const ScenarioOptions& opt, const std::string& metrics_out,
            const std::string& state_out, bool strict, std::size_t measure_rounds) {
  auto keys = resolve_keys(opt);
  SystemState s = generate_initial_state(keys, resolve_script(opt), opt.peers, opt.seed);
  IdealHpt ideal = build_ideal_hpt(keys);

  RunStats stats = run_until_legal(s, keys, opt.max_rounds, &ideal);
  if (stats.converged && strict) {
    std::size_t budget = opt.max_rounds - std::min(opt.max_rounds, stats.rounds_used);
    if (!settle_quiescent(s, keys, std::min<std::size_t>(budget, 200), &ideal))
      stats.converged = false;
  }

  ClosureStats window;
  bool have_window = false;
  if (stats.converged && measure_rounds > 0) {
    SystemState probe = s;
    if (settle_quiescent(probe, keys, 200, &ideal)) {
      window = run_legal_window(probe, keys, measure_rounds, &ideal);
      have_window = true;
    }
  }

  json metrics = metrics_to_json(opt.seed, keys.size(), s, stats, have_window ? &window : nullptr);
  if (!metrics_out.empty()) write_text_file(metrics_out, metrics.dump(2));
  if (!state_out.empty()) write_text_file(state_out, state_to_json(s).dump(2));

  std::cout << "seed " << opt.seed << ": " << (stats.converged ? "legal" : "NOT legal")
            << " after " << stats.rounds_used << " round(s), " << keys.size() << " key(s)\n";
  if (!stats.converged) {
    std::cerr << stats.final_report.summary() << "\n";
    return kExitNotConverged;
  }
  return 0;
}

int cmd_sweep(const ScenarioOptions& opt, int count, const std::string& out_path) {
  if (count < 1) throw BadInput("--count must be >= 1");
  struct Row {
    std::uint64_t seed = 0;
    bool converged = false;
    std::size_t rounds = 0;
    std::uint64_t reads = 0, msgs = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(count));

  // scenarios share nothing; the result order is fixed by index
#ifdef SHPT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < count; ++i) {
    ScenarioOptions local = opt;
    local.seed = opt.seed + static_cast<std::uint64_t>(i);
    auto keys = resolve_keys(local);
    SystemState s = generate_initial_state(keys, resolve_script(local), local.peers, local.seed);
    auto stats = run_until_legal(s, keys, local.max_rounds, nullptr, false);
    rows[static_cast<std::size_t>(i)] = {local.seed, stats.converged, stats.rounds_used,
                                         stats.max_reads_per_timeout,
                                         stats.max_msgs_per_timeout};
  }

  std::size_t converged = 0, rmin = SIZE_MAX, rmax = 0;
  double rsum = 0;
  json scenarios = json::array();
  for (const auto& r : rows) {
    scenarios.push_back({{"seed", r.seed},
                         {"converged", r.converged},
                         {"rounds", r.rounds},
                         {"max_reads_per_timeout", r.reads},
                         {"max_msgs_per_timeout", r.msgs}});
    if (r.converged) {
      ++converged;
      rmin = std::min(rmin, r.rounds);
      rmax = std::max(rmax, r.rounds);
      rsum += static_cast<double>(r.rounds);
    }
  }
  json out = {{"scenarios", scenarios},
              {"summary",
               {{"count", count},
                {"converged", converged},
                {"rounds_min", converged ? json(rmin) : json(nullptr)},
                {"rounds_mean", converged ? json(rsum / static_cast<double>(converged))
                                          : json(nullptr)},
                {"rounds_max", converged ? json(rmax) : json(nullptr)}}}};
  if (!out_path.empty())
    write_text_file(out_path, out.dump(2));
  else
    std::cout << out.dump(2) << "\n";
  std::cerr << converged << "/" << count << " scenarios converged\n";
  return converged == static_cast<std::size_t>(count) ? 0 : kExitNotConverged;
}

int cmd_query(const ScenarioOptions& opt, const std::string& queries_path) {
  auto keys = resolve_keys(opt);
  SystemState s = generate_initial_state(keys, resolve_script(opt), opt.peers, opt.seed);
  auto stats = run_until_legal(s, keys, opt.max_rounds);
  if (!stats.converged) {
    std::cerr << "did not reach a legal state within " << opt.max_rounds << " rounds\n";
    return kExitNotConverged;
  }

  std::ifstream in(queries_path);
  if (!in) throw BadInput("cannot open queries file: " + queries_path);
  std::string line;
  std::size_t lineno = 0;
  bool mismatch = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    auto x = BitLabel::parse(line.substr(start));
    if (!x) throw BadInput(queries_path + ":" + std::to_string(lineno) + ": bad query");

    std::uint64_t reads0 = s.metrics().dht_reads;
    auto answer = prefix_search(s, *x);
    std::uint64_t reads = s.metrics().dht_reads - reads0;
    if (!answer) {
      std::cerr << x->str() << ": no answer\n";
      mismatch = true;
      continue;
    }
    int best = -1;
    for (const auto& k : keys) best = std::max(best, lcp(*x, k).size());
    if (lcp(*x, *answer).size() != best) {
      std::cerr << x->str() << ": answer " << answer->str() << " misses the best lcp " << best
                << "\n";
      mismatch = true;
    }
    std::cout << x->str() << " " << answer->str() << " " << reads << "\n";
  }
  return mismatch ? kExitOracleMismatch : 0;
}

int cmd_check(const std::string& state_path, bool strict) {
  std::ifstream in(state_path);
  if (!in) throw BadInput("cannot open state file: " + state_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw BadInput(state_path + ": " + std::string(e.what()));
  }
  SystemState s = state_from_json(j);
  auto key_list = s.collect_keys();
  std::set<BitLabel> keys(key_list.begin(), key_list.end());
  if (keys.empty()) throw BadInput("state holds no keys");
  if (keys.size() != key_list.size()) throw BadInput("state holds duplicate key values");

  LegalityReport report = strict ? check_legal_strict(s, keys) : check_legal(s, keys);
  json violations = json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"rule", v.rule}, {"label", v.label.str()}, {"detail", v.detail}});
  json counters = json::object();
  auto vals = report.counters.values();
  for (std::size_t c = 0; c < PhaseCounters::kCount; ++c)
    counters[std::string(PhaseCounters::kNames[c])] = vals[c];
  json out = {{"legal", report.legal}, {"violations", violations}, {"counters", counters}};
  std::cout << out.dump(2) << "\n";
  std::cout << "legal: " << (report.legal ? "true" : "false") << "\n";
  return report.legal ? 0 : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-stabilizing hashed Patricia trie simulator"};
  app.require_subcommand(1);

  ScenarioOptions run_opt;
  std::string metrics_out, state_out;
  bool strict = false;
  std::size_t measure_rounds = 100;
  auto* run_cmd = app.add_subcommand("run", "run one scenario to a legal state");
  add_scenario_flags(run_cmd, run_opt);
  run_cmd->add_option("--metrics-out", metrics_out, "write a metrics document here");
  run_cmd->add_option("--state-out", state_out, "write the final state dump here");
  run_cmd->add_flag("--strict-quiescence", strict,
                    "require queued traffic to be harmless before declaring success");
  run_cmd->add_option("--measure-rounds", measure_rounds,
                      "post-convergence window for steady-state access maxima")
      ->capture_default_str();

  ScenarioOptions sweep_opt;
  int sweep_count = 20;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a batch of seeds and aggregate");
  add_scenario_flags(sweep_cmd, sweep_opt);
  sweep_cmd->add_option("--count", sweep_count, "number of consecutive seeds")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "write the aggregate document here");

  ScenarioOptions query_opt;
  std::string queries_path;
  auto* query_cmd = app.add_subcommand("query", "stabilize, then answer prefix queries");
  add_scenario_flags(query_cmd, query_opt);
  query_cmd->add_option("--queries", queries_path, "file of query strings, one per line")
      ->required();

  std::string state_path;
  bool check_strict = false;
  auto* check_cmd = app.add_subcommand("check", "check a state dump for legality");
  check_cmd->add_option("--state", state_path, "state dump file")->required();
  check_cmd->add_flag("--strict-quiescence", check_strict, "also require quiescent channels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed())
      return cmd_run(run_opt, metrics_out, state_out, strict, measure_rounds);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opt, sweep_count, sweep_out);
    if (query_cmd->parsed()) return cmd_query(query_opt, queries_path);
    if (check_cmd->parsed()) return cmd_check(state_path, check_strict);
  } catch (const BadInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
