// Command-line front end: mesh | run | compare | render.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "baca/errors.hpp"
#include "baca/experiment.hpp"

namespace {

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& flags) {
  cmd.add_option("--config", flags.config_path, "key = value configuration file");
  for (const auto& key : baca::config_keys()) {
    cmd.add_option("--" + key, flags.values[key], "override '" + key + "'");
  }
}

baca::RunConfig resolve(const ConfigFlags& flags) {
  baca::RunConfig cfg;
  if (!flags.config_path.empty()) cfg = baca::load_config(flags.config_path);
  for (const auto& [key, value] : flags.values) {
    if (!value.empty()) baca::set_config_value(cfg, key, value);
  }
  baca::validate(cfg);
  return cfg;
}

baca::RunSummary read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return baca::read_results_csv(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical matrices with ACA and block-adaptive ACA for 3D Laplace BEM"};
  app.require_subcommand(1);

  ConfigFlags mesh_flags, run_flags, render_flags;
  std::string mesh_out, render_out, cmp_a, cmp_b, cmp_out;

  auto* mesh_cmd = app.add_subcommand("mesh", "generate the configured mesh and write OFF");
  add_config_flags(*mesh_cmd, mesh_flags);
  mesh_cmd->add_option("--out", mesh_out, "OFF path (default <output_dir>/mesh.off)");

  auto* run_cmd = app.add_subcommand("run", "run a pipeline and write results.csv, trace.csv, "
                                            "blocks.svg and mesh.off");
  add_config_flags(*run_cmd, run_flags);

  auto* cmp_cmd = app.add_subcommand("compare", "ratios b/a of two results.csv files");
  cmp_cmd->add_option("a", cmp_a, "reference results.csv")->required();
  cmp_cmd->add_option("b", cmp_b, "compared results.csv")->required();
  cmp_cmd->add_option("--out", cmp_out, "write the comparison CSV here");

  auto* render_cmd = app.add_subcommand("render", "run a pipeline and render its block structure");
  add_config_flags(*render_cmd, render_flags);
  render_cmd->add_option("--out", render_out, "SVG path (default <output_dir>/blocks.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*mesh_cmd) {
      const auto cfg = resolve(mesh_flags);
      const auto mesh = baca::build_mesh(cfg);
      std::filesystem::path out = mesh_out.empty()
                                      ? std::filesystem::path(cfg.output_dir) / "mesh.off"
                                      : std::filesystem::path(mesh_out);
      if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
      baca::save_off(mesh, out.string());
      std::cout << "vertices " << mesh.num_vertices() << "\ntriangles " << mesh.num_triangles()
                << "\nwritten " << out.string() << '\n';
    } else if (*run_cmd) {
      const auto cfg = resolve(run_flags);
      const auto res = baca::run(cfg);
      std::cout << baca::results_csv_header() << '\n'
                << baca::results_csv_row(res.summary) << '\n';
    } else if (*cmp_cmd) {
      const auto rows = baca::compare(read_summary(cmp_a), read_summary(cmp_b));
      baca::write_comparison_csv(rows, std::cout);
      if (!cmp_out.empty()) {
        std::ofstream f(cmp_out);
        if (!f) throw std::runtime_error("cannot write " + cmp_out);
        baca::write_comparison_csv(rows, f);
      }
    } else if (*render_cmd) {
      const auto cfg = resolve(render_flags);
      if (cfg.pipeline == baca::Pipeline::dense) {
        throw baca::ConfigError("render needs the aca or baca pipeline");
      }
      const auto mesh = baca::build_mesh(cfg);
      const auto res = baca::run_pipeline(cfg, mesh);
      std::filesystem::path out = render_out.empty()
                                      ? std::filesystem::path(cfg.output_dir) / "blocks.svg"
                                      : std::filesystem::path(render_out);
      if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
      std::ofstream f(out);
      if (!f) throw std::runtime_error("cannot write " + out.string());
      f << res.svg;
      std::cout << "written " << out.string() << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
