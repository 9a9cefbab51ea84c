#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "baca/baca.hpp"
#include "baca/bem_kernel.hpp"
#include "baca/hmatrix.hpp"
#include "baca/mesh.hpp"

namespace baca {

enum class Pipeline { aca, baca, dense };

/// Flat experiment configuration; serialised as `key = value` lines.
struct RunConfig {
  // geometry
  std::string geometry = "icosphere";  // icosphere | ellipsoid | off
  int level = 3;
  double radius = 1.0;
  Vec3 semiaxes{1.0, 1.0, 3.0};
  int refine_rounds = 1;     // ellipsoid: red refinement rounds of the mid-region
  double refine_band = 1.5;  // mid-region: |x_3| < refine_band
  std::string off_path;
  // problem
  Vec3 source{1.1, 0.0, 0.0};
  // algorithm
  Pipeline pipeline = Pipeline::baca;
  int b_min = 15;
  double beta = 0.8;
  double eps_aca = 1e-6;
  double eps_baca = 1e-4;
  double theta = 0.9;
  double alpha = 100.0;
  int lookahead = 2;
  int initial_rank = 3;
  int max_outer = 200;
  double cg_tol = 1e-8;
  int cg_max_iter = 20000;
  QuadratureOptions quadrature;
  // run
  std::string output_dir = "out";
  int threads = 1;
  unsigned seed = 0;

  bool operator==(const RunConfig&) const;
};

/// Keys in serialisation order.
const std::vector<std::string>& config_keys();

/// Sets one field from text; throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Parses `key = value` lines; '#' starts a comment. Validates the result.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string serialize_config(const RunConfig& cfg);

/// Throws ConfigError when a parameter is out of range.
void validate(const RunConfig& cfg);

/// Source point of the four benchmark problems: p_i = (x_i, 0, 0).
Vec3 benchmark_source(int i);

TriMesh build_mesh(const RunConfig& cfg);

struct RunSummary {
  std::string pipeline;
  int n = 0;
  double e_h = 0.0;
  double final_residual = 0.0;
  double storage_mb = 0.0;            // full payload, MiB
  double storage_symmetric_mb = 0.0;  // blocks on or above the diagonal, MiB
  double compression_percent = 0.0;
  double avg_rank_ak = 0.0;
  double avg_rank_ahat = 0.0;
  std::size_t entries = 0;
  int cg_iterations = 0;
  int outer_iterations = 0;
  double assembly_seconds = 0.0;  // matrix approximation
  double solve_seconds = 0.0;
  double wall_seconds = 0.0;  // assembly + solve
  bool converged = true;
};

struct RunOutput {
  RunSummary summary;
  Eigen::VectorXd solution;
  std::vector<BacaIteration> trace;
  std::string svg;  // empty for the dense pipeline
};

/// Runs one pipeline on an existing mesh without touching the file system.
RunOutput run_pipeline(const RunConfig& cfg, const TriMesh& mesh);

/// Runs the configured pipeline and writes results.csv, trace.csv, blocks.svg
/// and mesh.off to cfg.output_dir.
RunOutput run(const RunConfig& cfg);

std::string results_csv_header();
std::string results_csv_row(const RunSummary& s);
void write_results_csv(const RunSummary& s, std::ostream& out);
RunSummary read_results_csv(std::istream& in);
void write_trace_csv(const std::vector<BacaIteration>& trace, std::ostream& out);

/// One rectangle per block in cluster order; red = dense, green = low rank
/// labelled with its look-ahead rank. Throws SizeError for N > 1e5.
std::string render_partition_svg(const HMatrix& h);
void render_partition_svg(const HMatrix& h, const std::string& path);

struct RatioRow {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  double ratio = 0.0;  // b / a
};

/// Ratios b / a of time, storage, entries and CG iterations. Throws
/// PreconditionError when the runs differ in N.
std::vector<RatioRow> compare(const RunSummary& a, const RunSummary& b);
void write_comparison_csv(const std::vector<RatioRow>& rows, std::ostream& out);

}  // namespace baca
