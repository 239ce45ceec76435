#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tumorbif/continuation.hpp"
#include "tumorbif/model.hpp"
#include "tumorbif/spectrum.hpp"

namespace tumorbif::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kResultDirEnv = "TUMORBIF_RESULTS_DIR";

/// A with R_A = 1 for f = identity: 2 I_1(1) / I_0(1).
double unit_radius_A();

struct ModelConfig {
  double A = 0.0;  // 0 selects unit_radius_A()
  std::optional<double> G;
  std::string f_kind = "identity";  // identity | michaelis-menten
  double sigma = 1.0;               // Michaelis-Menten constant

  NutrientFn nutrient() const;
  double resolved_A() const { return A > 0.0 ? A : unit_radius_A(); }
};

struct NumericsConfig {
  int radial_grid = 256;
  int n_r = 48;
  int n_theta = 128;
  int K = 0;  // 0: largest allowed by n_theta
  int k_max = 64;
  double ode_tol = 1e-14;
  double field_tol = 1e-10;
  double linear_tol = 1e-13;
  double continuation_tol = 1e-8;
};

struct TaskConfig {
  int l = 2;
  int k = 1;
  int count = 3;
  double eps_max = 0.05;
  int steps = 10;
  double fd_eps = 1e-4;
  double multiplier_bound = 1e-3;
  int attempts = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> branch_files;
};

struct RunConfig {
  ModelConfig model;
  NumericsConfig numerics;
  TaskConfig task;
  std::string out_dir = "results";

  /// Throws ConfigError naming the offending field.
  void validate() const;

  FieldOptions field_options() const;
  ContinuationOptions continuation_options() const;
  RadialOptions radial_options() const;
};

Json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const Json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

struct Provenance {
  int n_r = 0;
  int n_theta = 0;
  int radial_grid = 0;
  Json tolerances = Json::object();
  double wall_time_s = 0.0;
  std::string library_version;

  bool operator==(const Provenance&) const = default;
};

struct ResultFile {
  int schema_version = kSchemaVersion;
  std::string command;
  Json config = Json::object();
  Json payload = Json::object();
  Provenance provenance;

  bool operator==(const ResultFile&) const = default;
};

Json to_json(const ResultFile& r);
ResultFile result_from_json(const Json& j);
void write_result(const ResultFile& r, const std::filesystem::path& path);
ResultFile read_result(const std::filesystem::path& path);

Json to_json(const Branch& b);
Branch branch_from_json(const Json& j);

/// Plain comma-separated table with a header row; numbers at full precision.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct DiagramBranch {
  Branch branch;
  std::string label;
};

/// Bifurcation diagram: G horizontal, amplitude vertical, the trivial branch
/// on the axis and catalog points marked.
void emit_diagram(const std::vector<BifurcationPoint>& points,
                  const std::vector<DiagramBranch>& branches, const std::filesystem::path& path);

/// Outlines of the domains along a branch (chart image of sigma = 1), one
/// closed curve per selected point.
void emit_outlines(const Branch& branch, double R_A, const std::filesystem::path& path,
                   int max_curves = 4);

/// Throws Error when the file cannot be opened for writing.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tumorbif::io
