#ifndef WME_BENCH_HPP
#define WME_BENCH_HPP

#include "wme/enumeration.hpp"

#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace wme::bench {

enum class Distribution { UniformOpen01, Fixed, TwoPoint };

struct WeightDistribution
{
  Distribution kind = Distribution::UniformOpen01;
  /// Fixed: the weight of every literal. TwoPoint: w(A) = value, w(~A) = 1 - value.
  double value = 1.0;
};

struct GeneratorSpec
{
  uint32_t num_vars = 30;
  double clause_ratio = 1.5;
  WeightDistribution weights;
  uint64_t seed = 0;
};

/// Lower edge of the open interval uniform weights are drawn from; the upper edge is 1 - this.
inline constexpr double kUniformEpsilon = 1e-6;

/// Random 3-CNF: round(ratio * n) clauses of three distinct variables, random polarities.
/// Deterministic in the seed; weights are declared for every literal so the instance
/// serializes losslessly.
Instance generate_instance(const GeneratorSpec &spec, bool log_domain = true);

struct SweepCell
{
  std::string instance_id;
  std::shared_ptr<const Instance> instance;
  std::string task_label;
  std::string config_label;
  EnumerationTask task;
};

struct RunRecord
{
  std::string instance_id;
  std::string task_label;
  std::string config_label;
  double seconds = 0.0;
  bool complete = false;
  uint64_t models = 0;
  std::vector<double> topk_weights;
  SolverStats stats;
};

/// Runs every cell with a wall-clock limit of `timeout_seconds` on `threads` workers
/// (0 = hardware concurrency). Records come back in cell order.
std::vector<RunRecord> run_sweep(const std::vector<SweepCell> &cells, double timeout_seconds, unsigned threads = 0);

/// Penalized average runtime: unfinished runs count as twice the timeout.
double par2(const std::vector<RunRecord> &records, double timeout_seconds);

void write_csv_header(std::ostream &out);
void write_csv_row(std::ostream &out, const RunRecord &record);

}// namespace wme::bench

#endif
