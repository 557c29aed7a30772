#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enso/assimilation.hpp"
#include "enso/causal.hpp"
#include "enso/diagnostics.hpp"
#include "enso/estimation.hpp"
#include "enso/model.hpp"

namespace enso {

// ---------------------------------------------------------------------------
// Observational index data (monthly CSV)
// ---------------------------------------------------------------------------

// Recognized value columns: nino3 (degC, maps to T_E), nino4 (degC, T_C),
// hW (m), u (m/s), tau (m/s). Any subset may be present.
struct IndexDataset {
  std::vector<int> years;
  std::vector<int> months;  // 1..12
  std::map<std::string, std::vector<double>> columns;

  int n_rows() const { return static_cast<int>(years.size()); }
  bool has(const std::string& column) const { return columns.count(column) > 0; }
};

// Header must name the date columns (either `date` with ISO yyyy-mm[-dd]
// values or `year`+`month`) plus any recognized value columns. Rejects
// duplicate or non-increasing months, naming the offending line.
IndexDataset load_index_csv(const std::string& path);
void write_index_csv(const IndexDataset& dataset, const std::string& path);

struct YearRange {
  int first = 0;
  int last = 0;  // inclusive
};

// Subtract the per-calendar-month mean computed over `span` (>= 10 years,
// inside the data range) from every value column.
IndexDataset compute_anomalies(const IndexDataset& dataset, const YearRange& span);

// Anomaly dataset -> non-dimensional monthly Trajectory. Column order follows
// `vars` (model names: u, hW, TC, TE, tau); requires contiguous months.
Trajectory to_model_units(const IndexDataset& dataset,
                          const std::vector<std::string>& vars);

// MonthlySeries view of one physical-unit column (degC columns flagged).
MonthlySeries monthly_series_from_dataset(const IndexDataset& dataset,
                                          const std::string& column);

// ---------------------------------------------------------------------------
// Trajectory CSV + JSON sidecar
// ---------------------------------------------------------------------------
void write_trajectory_csv(const Trajectory& traj, const std::string& csv_path,
                          const std::string& sidecar_path,
                          Variant variant, double dt, std::uint64_t seed);
Trajectory load_trajectory_csv(const std::string& csv_path,
                               const std::string& sidecar_path = "");

// ---------------------------------------------------------------------------
// Model / fit / library JSON
// ---------------------------------------------------------------------------
std::string model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const std::string& json_text);
void save_model(const ModelSpec& model, const std::string& path);
ModelSpec load_model(const std::string& path);

std::string library_manifest_json(const FunctionLibrary& library);
std::string fit_to_json(const FitResult& fit);

// CEM (and optional mask) as heat-map CSV: row = equation, column = candidate.
void write_cem_csv(const CausationEntropyMatrix& cem, const StructurePattern* pattern,
                   const std::string& path);

// Posterior output: time,var,mean,std rows.
void write_posterior_csv(const PosteriorSeries& post, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace enso
