#include "hybridwave/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hybridwave/error.hpp"

namespace hybridwave {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.precision(17);
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

}  // namespace

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c][r];
    out << '\n';
  }
  finish(out, path);
}

void write_seismogram(const RunOutputs& out, const std::filesystem::path& path) {
  CsvTable t;
  t.header.push_back("t");
  t.columns.push_back(out.seismogram_time);
  for (std::size_t i = 0; i < out.traces.size(); ++i) {
    t.header.push_back("r" + std::to_string(i));
    t.columns.push_back(out.traces[i]);
  }
  write_csv(t, path);
}

void write_energy(const RunOutputs& out, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"t", "E_fem_kin", "E_fem_pot", "E_fdm_kin", "E_fdm_pot", "E_total", "E_total_naive"};
  t.columns.assign(7, {});
  for (const EnergySample& e : out.energy) {
    const double row[7] = {e.t, e.fem_kinetic, e.fem_potential, e.fdm_kinetic, e.fdm_potential, e.total, e.total_naive};
    for (int c = 0; c < 7; ++c) t.columns[c].push_back(row[c]);
  }
  write_csv(t, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::format, path.string() + ": missing header row");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  }
  t.columns.assign(t.header.size(), {});
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t c = 0, pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      double v = 0.0;
      auto [p, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
      if (ec != std::errc() || p != line.data() + end || c >= t.columns.size()) {
        throw Error(ErrorKind::format, path.string() + ": bad value on line " + std::to_string(lineno));
      }
      t.columns[c++].push_back(v);
      pos = end + 1;
    }
    if (c != t.columns.size()) {
      throw Error(ErrorKind::format, path.string() + ": wrong column count on line " + std::to_string(lineno));
    }
  }
  return t;
}

void write_manifest(const RunOutputs& out, const ManifestInfo& info, const std::filesystem::path& path) {
  std::ofstream os = open_out(path);
  os << "hybridwave " << HYBRIDWAVE_VERSION << "\n";
  os << "compiler " << __VERSION__ << "\n";
  os << "mode " << info.mode << "\n";
  os << "steps_requested " << info.steps_requested << "\n";
  os << "steps_completed " << out.seismogram_time.size() << "\n";
  os << "status " << (out.completed ? "completed" : "failed") << "\n";
  if (!out.completed) os << "failure " << out.failure << "\nfailed_step " << out.failed_step << "\n";
  os << "wall_seconds " << out.wall_seconds << "\n";
  for (const std::string& w : info.warnings) os << "warning " << w << "\n";
  os << "--- config ---\n" << info.config_text;
  finish(os, path);
}

SeismogramComparison compare_seismograms(std::span<const double> a, std::span<const double> b, int max_lag) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::size_mismatch, "seismograms have " + std::to_string(a.size()) + " and " +
                                              std::to_string(b.size()) + " samples");
  }
  SeismogramComparison r;
  double na = 0.0, nb = 0.0, nd = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
    nd += d * d;
    r.max_abs_diff = std::max(r.max_abs_diff, std::abs(d));
  }
  const double denom = std::max({std::sqrt(na), std::sqrt(nb), std::numeric_limits<double>::min()});
  r.relative_l2 = std::sqrt(nd) / denom;

  const long n = static_cast<long>(a.size());
  double best = -std::numeric_limits<double>::infinity();
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (long k = std::max(0L, -static_cast<long>(lag)); k < n && k + lag < n; ++k) acc += a[k] * b[k + lag];
    // Ties go to the smallest |lag|.
    if (acc > best || (acc == best && std::abs(lag) < std::abs(r.lag))) {
      best = acc;
      r.lag = lag;
    }
  }
  return r;
}

}  // namespace hybridwave
