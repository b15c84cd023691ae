#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adi/types.hpp"

namespace adi {

/// Serialized-form schema version; bumped on any field or layout change.
inline constexpr int kRunRecordSchemaVersion = 1;

/// One solver run: problem descriptor, parameters, per-iteration histories,
/// and the wall-clock measurement.  For the Riccati driver `iterations` counts
/// outer steps and `inner_iterations` the sweeps inside each; for the Lyapunov
/// solvers `inner_iterations` stays empty.  `compress_tol` is recorded so runs
/// with factor recompression are distinguishable from the default exact-width
/// bookkeeping.
struct RunRecord {
  std::string family;
  Index n = 0;
  Index p = 0;
  Index m = 0;  // input count; 0 for Lyapunov runs
  std::string solver;
  double alpha = 0.0;
  double omega = 0.0;
  std::optional<double> beta;
  std::string criterion = "res";
  double tol = 1e-12;
  Index iterations = 0;
  std::vector<Index> inner_iterations;
  std::vector<double> residual_history;
  std::vector<Index> width_history;
  bool converged = false;
  double wall_milliseconds = 0.0;
  std::optional<double> compress_tol;

  /// Histories must pair up with the iteration count.
  void validate() const;
};

/// JSON array of records under {"schema": ..., "records": [...]}; doubles
/// survive a round-trip bit for bit.
std::string to_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_json(const std::string& text);

/// One CSV row per record, histories packed into single cells with ';'
/// separators and %.17g formatting; numerically identical to the JSON form.
std::string to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const std::string& text);

/// Two-column (iteration, residual) CSV of one record's history, for external
/// plotting of residual curves.
std::string residual_history_csv(const RunRecord& record);

}  // namespace adi
