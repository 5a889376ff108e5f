#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rtrecover/analysis.hpp"

namespace rtrecover {

enum class RefineMode { kDefault, kRegular, kBisection, kAdaptive };

struct RunConfig {
  int problem = 1;                 // 1 and 2: smooth solution on [0,1]^2, 3: slit square
  int r = 1;
  RefineMode refine = RefineMode::kDefault;  // problem 3 defaults to adaptive, others to regular
  int levels = 0;                  // 0: 5 for uniform refinement, unbounded for adaptive
  long max_ndof = 0;               // 0: 2e5 for adaptive, unbounded for uniform refinement
  double theta = 0.3;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string mesh;                // mesh file; overrides domain
  std::string domain;              // unit-square | slit-square; empty picks the problem's domain
  int initial_nt = 0;              // 0: 86 on the unit square, 8 on the slit square
  int quad_degree = -1;
  double reaction = 0.0;           // c in -div grad u + c u = f (problems 1 and 2)
  int samples = 500;               // verify
  double aspect_max = 20.0;        // verify
};

/// Sets one field from its textual key ("max-ndof" and "max_ndof" both work).
/// Throws std::invalid_argument on an unknown key or a malformed value.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment.
void load_config(RunConfig& config, std::istream& in);
void load_config_file(RunConfig& config, const std::string& path);

/// Fills in the problem-dependent defaults and checks ranges.
RunConfig resolve(RunConfig config);

const char* to_string(RefineMode mode);

struct OrderFit {
  std::string column;
  double order = 0.0;  // NaN when it cannot be fitted
};

struct ExperimentResult {
  std::vector<ErrorReport> reports;
  std::vector<OrderFit> orders;
};

/// Orders of every error column fitted against ndof, skipping the coarsest level.
std::vector<OrderFit> fit_orders(const std::vector<ErrorReport>& reports);

/// Runs the configured experiment; progress lines go to `log`.
ExperimentResult run_experiment(const RunConfig& config, std::ostream& log);

/// table.csv, orders.txt and convergence.svg in config.out.
void write_outputs(const RunConfig& config, const ExperimentResult& result);

void write_orders(std::ostream& out, const std::vector<OrderFit>& orders);
void write_convergence_svg(std::ostream& out, const std::vector<ErrorReport>& reports, const std::string& title);

}  // namespace rtrecover
