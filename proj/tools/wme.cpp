// wme: weighted model enumeration from the command line.
//
//   wme enumerate [--mode all|threshold|topk] [--theta T] [--k K] FILE
//   wme oracle    [same mode flags] FILE
//   wme check --against-oracle [same flags] FILE
//   wme gen --vars N --ratio R --seed S [--dist uniform|fixed|twopoint] [--value V] [-o FILE]
//   wme sweep --vars N --ratio R --seeds M [mode flags] [--configs ...] [--timeout SEC]
//
// Exit status: 0 complete, 10 timeout or partial result, 2 bad input, 1 check mismatch.

#include "wme/bench.hpp"
#include "wme/enumeration.hpp"
#include "wme/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitComplete = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;
constexpr int kExitPartial = 10;

struct InputError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct TaskOptions
{
  std::string mode = "all";
  std::optional<double> theta;
  std::optional<uint32_t> k;
  std::optional<std::string> backtracking;
  bool no_weight_pruning = false;
  bool no_priority_opt = false;
  bool linear_weights = false;
  uint64_t seed = 0;
  std::optional<double> timeout;
  std::optional<std::string> stats_json;
};

void add_task_flags(CLI::App *cmd, TaskOptions &o)
{
  cmd->add_option("--mode", o.mode, "all, threshold or topk")
    ->check(CLI::IsMember({ "all", "threshold", "topk" }))
    ->capture_default_str();
  cmd->add_option("--theta", o.theta, "threshold: keep models with w >= theta");
  cmd->add_option("--k", o.k, "top-k: number of models");
  cmd->add_option("--backtracking", o.backtracking, "chrono or nonchrono (default: nonchrono for topk, else chrono)")
    ->check(CLI::IsMember({ "chrono", "nonchrono" }));
  cmd->add_flag("--no-weight-pruning", o.no_weight_pruning, "disable weight-based pruning");
  cmd->add_flag("--no-priority-opt", o.no_priority_opt, "disable branching on weight-relevant variables first");
  cmd->add_flag("--linear-weights", o.linear_weights, "run weight arithmetic on products instead of log sums");
  cmd->add_option("--seed", o.seed, "branching seed")->capture_default_str();
  cmd->add_option("--timeout", o.timeout, "wall-clock limit in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--stats-json", o.stats_json, "write statistics as JSON to this path");
}

wme::EnumerationTask make_task(const TaskOptions &o)
{
  wme::EnumerationTask task;
  if (o.mode == "threshold") {
    if (!o.theta) throw InputError("--mode threshold requires --theta");
    if (!(*o.theta > 0.0) || !std::isfinite(*o.theta)) throw InputError("--theta must be a positive number");
    task.mode = wme::Mode::Threshold;
    task.theta = *o.theta;
  } else if (o.mode == "topk") {
    if (!o.k) throw InputError("--mode topk requires --k");
    if (*o.k == 0) throw InputError("--k must be at least 1");
    task.mode = wme::Mode::TopK;
    task.k = *o.k;
  } else {
    task.mode = wme::Mode::All;
  }
  if (o.theta && task.mode != wme::Mode::Threshold) throw InputError("--theta only applies to --mode threshold");
  if (o.k && task.mode != wme::Mode::TopK) throw InputError("--k only applies to --mode topk");

  const std::string style = o.backtracking.value_or(task.mode == wme::Mode::TopK ? "nonchrono" : "chrono");
  task.config = wme::SolverConfig::for_style(
    style == "chrono" ? wme::Backtracking::Chronological : wme::Backtracking::NonChronological);
  task.config.weight_pruning = !o.no_weight_pruning;
  task.config.seed = o.seed;
  task.priority_optimization = !o.no_priority_opt;
  task.collect_models = false;
  if (o.timeout) task.time_limit = std::chrono::duration<double>(*o.timeout);
  return task;
}

wme::Instance read_instance(const std::string &path, bool log_domain)
{
  try {
    if (path == "-") return wme::parse_instance(std::cin, log_domain);
    return wme::load_instance(path, log_domain);
  } catch (const std::exception &e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string sig12(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void print_model(std::ostream &out, const std::vector<bool> &values, double weight, double log_weight, bool log_domain)
{
  out << 'v';
  for (uint32_t v = 0; v < values.size(); ++v) out << ' ' << (values[v] ? "" : "-") << v + 1;
  out << " 0 w " << sig12(weight);
  if (log_domain) out << " lw " << sig12(log_weight);
  out << '\n';
}

nlohmann::json stats_json(const wme::EnumerationResult &r)
{
  const auto &s = r.stats;
  return nlohmann::json{ { "decisions", s.decisions }, { "propagations", s.propagations },
    { "conflicts", s.conflicts }, { "weight_conflicts", s.weight_conflicts },
    { "mean_weight_set_size", s.mean_weight_set_size() }, { "restarts", s.restarts },
    { "learned_clauses", s.learned_clauses }, { "blocking_clauses", s.blocking_clauses },
    { "weight_clauses", s.weight_clauses }, { "deleted_clauses", s.deleted_clauses },
    { "peak_clauses", s.peak_clauses }, { "models_found", s.models }, { "models_emitted", r.emitted },
    { "bound_updates", s.bound_updates }, { "residual_backtracks", s.residual_backtracks },
    { "relevant_checks", r.relevant_checks }, { "complete", r.complete }, { "seconds", r.seconds } };
}

void report_stats(const TaskOptions &o, const wme::EnumerationResult &r)
{
  const auto j = stats_json(r);
  if (o.stats_json) {
    std::ofstream out(*o.stats_json);
    if (!out) throw InputError("cannot write " + *o.stats_json);
    out << j.dump(2) << '\n';
    return;
  }
  for (const auto &[key, value] : j.items()) std::cerr << "c " << key << ' ' << value.dump() << '\n';
}

int run_enumerate(const TaskOptions &o, const std::string &path)
{
  const wme::EnumerationTask task = make_task(o);
  const wme::Instance inst = read_instance(path, !o.linear_weights);
  const bool log = inst.weights.log_domain();
  std::ostream &out = std::cout;
  const auto result = wme::enumerate(inst, task, [&](const wme::ModelRecord &m) {
    print_model(out, m.values, m.weight, m.log_weight, log);
  });
  uint64_t count = result.emitted;
  if (task.mode == wme::Mode::TopK) {
    out << "s TOPK " << result.models.size() << '\n';
    for (const auto &m : result.models) print_model(out, m.values, m.weight, m.log_weight, log);
    count = result.models.size();
  }
  out << "s " << (result.complete ? "COMPLETE " : "INCOMPLETE ") << count << '\n';
  out.flush();
  report_stats(o, result);
  return result.complete ? kExitComplete : kExitPartial;
}

wme::oracle::OracleResult run_oracle_task(const wme::EnumerationTask &task, const wme::Instance &inst)
{
  if (inst.formula.num_vars > wme::oracle::kMaxVars)
    throw InputError("oracle handles at most " + std::to_string(wme::oracle::kMaxVars) + " variables");
  switch (task.mode) {
  case wme::Mode::Threshold: return wme::oracle::threshold(inst, task.theta);
  case wme::Mode::TopK: return wme::oracle::top_k(inst, task.k);
  case wme::Mode::All: break;
  }
  return wme::oracle::all(inst);
}

int run_oracle(const TaskOptions &o, const std::string &path)
{
  const wme::EnumerationTask task = make_task(o);
  const wme::Instance inst = read_instance(path, !o.linear_weights);
  const bool log = inst.weights.log_domain();
  const auto res = run_oracle_task(task, inst);
  for (const auto &m : res.models) print_model(std::cout, m.values, m.weight, m.log_weight, log);
  if (task.mode == wme::Mode::TopK) {
    std::cout << "s TOPK " << res.models.size() << '\n';
    for (const auto &m : res.models) print_model(std::cout, m.values, m.weight, m.log_weight, log);
    if (res.tie_flagged) std::cout << "c tie group of " << res.tie_group << " at weight " << sig12(*res.kth_weight) << '\n';
  }
  std::cout << "s COMPLETE " << res.models.size() << '\n';
  return kExitComplete;
}

int run_check(const TaskOptions &o, const std::string &path)
{
  wme::EnumerationTask task = make_task(o);
  task.collect_models = true;
  const wme::Instance inst = read_instance(path, !o.linear_weights);
  const auto expected = run_oracle_task(task, inst);
  const auto result = wme::enumerate(inst, task);
  report_stats(o, result);
  if (!result.complete) {
    std::cout << "INCOMPLETE\n";
    return kExitPartial;
  }
  const auto diff = task.mode == wme::Mode::TopK ? wme::oracle::compare_top_k(inst, expected, result.models)
                                                 : wme::oracle::compare_sets(expected, result.models);
  if (diff) {
    std::cout << "MISMATCH " << *diff << '\n';
    return kExitMismatch;
  }
  std::cout << "MATCH\n";
  return kExitComplete;
}

struct GenOptions
{
  uint32_t vars = 30;
  double ratio = 1.5;
  uint64_t seed = 0;
  std::string dist = "uniform";
  double value = 1.0;
  std::string output = "-";
};

void add_gen_flags(CLI::App *cmd, GenOptions &g)
{
  cmd->add_option("--vars", g.vars, "number of variables")->check(CLI::Range(3U, 1U << 24U))->capture_default_str();
  cmd->add_option("--ratio", g.ratio, "clauses per variable")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--dist", g.dist, "weight distribution")
    ->check(CLI::IsMember({ "uniform", "fixed", "twopoint" }))
    ->capture_default_str();
  cmd->add_option("--value", g.value, "fixed weight, or p for twopoint")->capture_default_str();
}

wme::bench::GeneratorSpec make_spec(const GenOptions &g, uint64_t seed)
{
  wme::bench::GeneratorSpec spec;
  spec.num_vars = g.vars;
  spec.clause_ratio = g.ratio;
  spec.seed = seed;
  if (g.dist == "fixed") {
    if (!(g.value > 0.0)) throw InputError("--value must be positive for the fixed distribution");
    spec.weights = { wme::bench::Distribution::Fixed, g.value };
  } else if (g.dist == "twopoint") {
    if (!(g.value > 0.0 && g.value < 1.0)) throw InputError("--value must lie in (0, 1) for the twopoint distribution");
    spec.weights = { wme::bench::Distribution::TwoPoint, g.value };
  }
  return spec;
}

int run_gen(const GenOptions &g)
{
  const auto inst = wme::bench::generate_instance(make_spec(g, g.seed));
  const std::string text = wme::write_instance(inst);
  if (g.output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(g.output);
    if (!out) throw InputError("cannot write " + g.output);
    out << text;
  }
  return kExitComplete;
}

struct SweepOptions
{
  GenOptions gen;
  uint32_t seeds = 20;
  uint64_t first_seed = 1;
  std::string mode = "threshold";
  std::optional<double> theta;
  std::optional<uint32_t> k;
  std::vector<std::string> configs{ "cb", "ncb" };
  bool no_priority_opt = false;
  double timeout = 60.0;
  unsigned threads = 0;
  std::string csv = "-";
};

wme::SolverConfig config_for(const std::string &label)
{
  const bool chrono = label.rfind("cb", 0) == 0;
  auto c = wme::SolverConfig::for_style(chrono ? wme::Backtracking::Chronological : wme::Backtracking::NonChronological);
  c.weight_pruning = label.find("nopr") == std::string::npos;
  return c;
}

int run_sweep(const SweepOptions &s)
{
  TaskOptions base;
  base.mode = s.mode;
  base.k = s.k;
  base.no_priority_opt = s.no_priority_opt;
  // Default threshold for sweeps: 0.5^n.
  if (s.mode == "threshold") base.theta = s.theta.value_or(std::pow(0.5, s.gen.vars));
  else base.theta = s.theta;
  const wme::EnumerationTask task = make_task(base);

  std::vector<wme::bench::SweepCell> cells;
  for (uint32_t i = 0; i < s.seeds; ++i) {
    const uint64_t seed = s.first_seed + i;
    auto inst = std::make_shared<const wme::Instance>(wme::bench::generate_instance(make_spec(s.gen, seed)));
    for (const auto &label : s.configs) {
      wme::bench::SweepCell cell;
      cell.instance_id = "n" + std::to_string(s.gen.vars) + "-r" + sig12(s.gen.ratio) + "-s" + std::to_string(seed);
      cell.instance = inst;
      cell.task_label = s.mode == "topk" ? "topk" + std::to_string(task.k) : s.mode;
      cell.config_label = label;
      cell.task = task;
      cell.task.config = config_for(label);
      cells.push_back(std::move(cell));
    }
  }
  const auto records = wme::bench::run_sweep(cells, s.timeout, s.threads);

  std::ofstream file;
  if (s.csv != "-") {
    file.open(s.csv);
    if (!file) throw InputError("cannot write " + s.csv);
  }
  std::ostream &out = s.csv == "-" ? std::cout : file;
  wme::bench::write_csv_header(out);
  for (const auto &r : records) wme::bench::write_csv_row(out, r);

  bool all_complete = true;
  for (const auto &label : s.configs) {
    std::vector<wme::bench::RunRecord> group;
    for (const auto &r : records)
      if (r.config_label == label) group.push_back(r);
    for (const auto &r : group) all_complete = all_complete && r.complete;
    std::cerr << "c par2 " << label << ' ' << wme::bench::par2(group, s.timeout) << '\n';
  }
  return all_complete ? kExitComplete : kExitPartial;
}

}// namespace

int main(int argc, char **argv)
{
  std::ios::sync_with_stdio(false);
  CLI::App app{ "Weighted model enumeration" };
  app.require_subcommand(1);

  TaskOptions enum_opts;
  std::string enum_file;
  auto *enumerate_cmd = app.add_subcommand("enumerate", "enumerate weighted models");
  add_task_flags(enumerate_cmd, enum_opts);
  enumerate_cmd->add_option("file", enum_file, "instance (- for stdin)")->required();

  TaskOptions oracle_opts;
  std::string oracle_file;
  auto *oracle_cmd = app.add_subcommand("oracle", "brute-force reference answer (small instances)");
  add_task_flags(oracle_cmd, oracle_opts);
  oracle_cmd->add_option("file", oracle_file, "instance (- for stdin)")->required();

  TaskOptions check_opts;
  std::string check_file;
  bool against_oracle = false;
  auto *check_cmd = app.add_subcommand("check", "compare the solver with the brute-force oracle");
  add_task_flags(check_cmd, check_opts);
  check_cmd->add_flag("--against-oracle", against_oracle, "compare with brute force")->required();
  check_cmd->add_option("file", check_file, "instance (- for stdin)")->required();

  GenOptions gen_opts;
  auto *gen_cmd = app.add_subcommand("gen", "generate a random weighted 3-CNF instance");
  add_gen_flags(gen_cmd, gen_opts);
  gen_cmd->add_option("--seed", gen_opts.seed, "generator seed")->capture_default_str();
  gen_cmd->add_option("-o,--output", gen_opts.output, "output path (- for stdout)")->capture_default_str();

  SweepOptions sweep_opts;
  auto *sweep_cmd = app.add_subcommand("sweep", "run generated instances across configurations, CSV out");
  add_gen_flags(sweep_cmd, sweep_opts.gen);
  sweep_cmd->add_option("--seeds", sweep_opts.seeds, "number of instances")->capture_default_str();
  sweep_cmd->add_option("--first-seed", sweep_opts.first_seed, "seed of the first instance")->capture_default_str();
  sweep_cmd->add_option("--mode", sweep_opts.mode, "all, threshold or topk")
    ->check(CLI::IsMember({ "all", "threshold", "topk" }))
    ->capture_default_str();
  sweep_cmd->add_option("--theta", sweep_opts.theta, "threshold (default 0.5^vars)");
  sweep_cmd->add_option("--k", sweep_opts.k, "top-k size");
  sweep_cmd->add_option("--configs", sweep_opts.configs, "any of cb, ncb, cb-nopr, ncb-nopr")
    ->check(CLI::IsMember({ "cb", "ncb", "cb-nopr", "ncb-nopr" }))
    ->capture_default_str();
  sweep_cmd->add_flag("--no-priority-opt", sweep_opts.no_priority_opt, "disable weight-relevant priority");
  sweep_cmd->add_option("--timeout", sweep_opts.timeout, "per-run limit in seconds")->capture_default_str();
  sweep_cmd->add_option("--threads", sweep_opts.threads, "worker threads (0 = all cores)")->capture_default_str();
  sweep_cmd->add_option("--csv", sweep_opts.csv, "CSV path (- for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*enumerate_cmd) return run_enumerate(enum_opts, enum_file);
    if (*oracle_cmd) return run_oracle(oracle_opts, oracle_file);
    if (*check_cmd) return run_check(check_opts, check_file);
    if (*gen_cmd) return run_gen(gen_opts);
    if (*sweep_cmd) return run_sweep(sweep_opts);
  } catch (const InputError &e) {
    std::cerr << "wme: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "wme: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
