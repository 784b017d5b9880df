#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hybridwave/simulation.hpp"

namespace hybridwave {

/// Columns of a CSV file with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
};

/// Header t, r0, r1, ...; one row per step. Values use 17 significant digits.
void write_seismogram(const RunOutputs& out, const std::filesystem::path& path);
/// Header t, E_fem_kin, E_fem_pot, E_fdm_kin, E_fdm_pot, E_total, E_total_naive.
void write_energy(const RunOutputs& out, const std::filesystem::path& path);
void write_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);

struct ManifestInfo {
  std::string config_text;
  std::string mode;
  std::int64_t steps_requested = 0;
  std::vector<std::string> warnings;
};
void write_manifest(const RunOutputs& out, const ManifestInfo& info, const std::filesystem::path& path);

struct SeismogramComparison {
  double relative_l2 = 0.0;
  double max_abs_diff = 0.0;
  int lag = 0;  // shift of b relative to a at the cross-correlation peak
};

/// ||a - b|| / max(||a||, ||b||, tiny), max |a - b|, and the lag in
/// [-max_lag, max_lag] maximising sum_k a[k] b[k + lag].
SeismogramComparison compare_seismograms(std::span<const double> a, std::span<const double> b, int max_lag = 50);

}  // namespace hybridwave
