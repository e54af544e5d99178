#pragma once

// Artifact writers: trajectory CSV, JSON reports, two-column plot files.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"

#include "riemann/curvature.hpp"
#include "riemann/dynamics.hpp"
#include "riemann/error.hpp"

namespace riemann {

/// Output file could not be created or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

inline constexpr int kTrajectoryColumns = 32;

inline std::string trajectory_header() {
  std::string h = "# t";
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) h += fmt::format(",R{}{}", i, j);
  for (int i = 1; i <= 3; ++i) h += fmt::format(",a{}", i);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) h += fmt::format(",S{}{}", i, j);
  for (int i = 1; i <= 3; ++i) h += fmt::format(",adot{}", i);
  for (int i = 1; i <= 3; ++i) h += fmt::format(",L{}", i);
  for (int i = 1; i <= 3; ++i) h += fmt::format(",C{}", i);
  return h + ",E";
}

/// One CSV row per sample, shortest round-trip decimal representation.
inline std::string trajectory_csv(const Trajectory& tr, const std::vector<double>& energy) {
  if (energy.size() != tr.samples.size()) throw std::invalid_argument("trajectory_csv: one energy per sample needed");
  std::string out = trajectory_header() + "\n";
  fmt::memory_buffer row;
  for (std::size_t n = 0; n < tr.samples.size(); ++n) {
    const RiemannState& s = tr.samples[n];
    row.clear();
    auto put = [&](double x) { fmt::format_to(std::back_inserter(row), ",{}", x); };
    fmt::format_to(std::back_inserter(row), "{}", s.t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) put(s.R.matrix()(i, j));
    for (int i = 0; i < 3; ++i) put(s.A[i]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) put(s.S.matrix()(i, j));
    for (int i = 0; i < 3; ++i) put(s.adot[i]);
    for (int i = 0; i < 3; ++i) put(s.L[i]);
    for (int i = 0; i < 3; ++i) put(s.C[i]);
    put(energy[n]);
    out.append(row.data(), row.size());
    out += '\n';
  }
  return out;
}

inline std::string plot_data(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("plot_data: column lengths differ");
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) out += fmt::format("{} {}\n", x[i], y[i]);
  return out;
}

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
  f << body;
  f.flush();
  if (!f) throw IoError("write to '" + p.string() + "' failed");
}

inline nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }

inline nlohmann::json to_json(const Mat3& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

inline nlohmann::json to_json(const ConservationReport& r) {
  return {{"samples", r.t.size()},
          {"initial",
           {{"energy", r.energy.front()},
            {"lab_L", to_json(r.lab_L.front())},
            {"lab_C", to_json(r.lab_C.front())},
            {"norm_L", r.norm_L.front()},
            {"norm_C", r.norm_C.front()}}},
          {"drift",
           {{"energy", r.drift_energy},
            {"lab_L", r.drift_lab_L},
            {"lab_C", r.drift_lab_C},
            {"norm_L", r.drift_norm_L},
            {"norm_C", r.drift_norm_C}}}};
}

inline nlohmann::json to_json(const CurvatureReport& r) {
  nlohmann::json j{{"connection", r.connection}, {"a", to_json(r.at.values())}, {"T", to_json(r.T)},
                   {"Rfield", to_json(r.Rfield)}};
  // T_ij, 1-based names
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) j[fmt::format("T{}{}", i + 1, k + 1)] = r.T(i, k);
  return j;
}

inline nlohmann::json to_json(const BianchiReport& r) { return {{"residual1", r.residual1}, {"residual2", r.residual2}}; }

inline nlohmann::json to_json(const DisplacementReport& r) {
  return {{"max_curl", r.max_curl}, {"max_potential_mismatch", r.max_potential_mismatch}, {"points", r.points}};
}

}  // namespace riemann
