#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "resobs/dynamics.hpp"
#include "resobs/harness.hpp"
#include "resobs/reservoir.hpp"
#include "resobs/topology.hpp"

namespace resobs {

/// `digits` significant digits; infinities print as inf / -inf.
std::string format_double(double v, int digits = 17);

/// Header `t,<channel>,...`, one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// Inverse of write_trajectory_csv. The time column must form a uniform grid.
Trajectory read_trajectory_csv(std::istream& in);

/// Coordinate list: header `n=<dim>`, then `i,j,value` per stored entry.
void write_matrix_coo(std::ostream& out, const WeightedMatrix& w);
WeightedMatrix read_matrix_coo(std::istream& in);

/// Rectangular variant: header `shape=<rows>x<cols>`, every entry listed.
void write_dense_coo(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_dense_coo(std::istream& in);

/// Snapshot directory: w.coo, w_in.coo, w_out.coo, c.coo and model.txt
/// (every ReservoirConfig key plus the channel map).
void save_observer(const std::filesystem::path& dir, const TrainedObserver& obs);
TrainedObserver load_observer(const std::filesystem::path& dir);

/// `parameter,value,seed,mse,wall_seconds`. The timing column is left empty
/// unless `with_timing`, which keeps the file byte-reproducible.
void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records, bool with_timing);
/// `topology,seed,mse`
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRecord> records);
/// `topology,median_mse,mean_mse,n_ok,n_failed`
void write_comparison_summary_csv(std::ostream& out, std::span<const ComparisonRecord> records);

/// `t,y_true,z_true,y_pred,z_pred` (column names follow the output channels).
void write_predictions_csv(std::ostream& out, const Trajectory& truth, const Trajectory& predicted);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

} // namespace resobs
