#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "baca/errors.hpp"
#include "baca/experiment.hpp"

using namespace baca;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("baca_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(BACA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config(Pipeline pipeline) {
  RunConfig c;
  c.level = 2;
  c.b_min = 6;
  c.pipeline = pipeline;
  c.source = benchmark_source(2);
  return c;
}

}  // namespace

TEST_CASE("configuration round trip") {
  RunConfig c;
  c.geometry = "ellipsoid";
  c.semiaxes = Vec3(1.0, 2.0, 3.5);
  c.source = Vec3(0.1, -2.5, 1e-3);
  c.theta = 0.65;
  c.eps_aca = 3.3e-7;
  c.pipeline = Pipeline::aca;
  c.quadrature.near_depth = 3;
  c.threads = 2;
  c.seed = 42;
  std::istringstream in(serialize_config(c));
  const RunConfig back = parse_config(in);
  CHECK(back == c);
  CHECK(serialize_config(back) == serialize_config(c));
  for (const auto& key : config_keys()) {
    RunConfig d;
    set_config_value(d, key, get_config_value(c, key));
    CHECK(get_config_value(d, key) == get_config_value(c, key));
  }
}

TEST_CASE("configuration parsing") {
  std::istringstream in("# comment\nlevel = 2   # trailing\n\nsource = p4\ntheta=0.5\n");
  const auto c = parse_config(in);
  CHECK(c.level == 2);
  CHECK(c.source == Vec3(1.05, 0, 0));
  CHECK(c.theta == 0.5);
  RunConfig d;
  CHECK_THROWS_AS(set_config_value(d, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(d, "level", "two"), ConfigError);
  CHECK_THROWS_AS(set_config_value(d, "pipeline", "fast"), ConfigError);
  d.theta = 1.5;
  CHECK_THROWS_AS(validate(d), ConfigError);
  std::istringstream bad("level 3\n");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  CHECK_THROWS_AS(benchmark_source(5), RangeError);
}

TEST_CASE("invalid parameters exit with status 2") {
  const auto dir = scratch("invalid");
  CHECK(cli("run --theta 1.5 --output_dir " + dir.string()) == 2);
  CHECK(cli("run --level -1 --output_dir " + dir.string()) == 2);
  CHECK(cli("run --pipeline nope") == 2);
  CHECK(cli("--no-such-flag") == 2);
  CHECK(cli("") == 2);
  CHECK(cli("--help") == 0);
}

TEST_CASE("mesh subcommand") {
  const auto dir = scratch("mesh");
  REQUIRE(cli("mesh --level 1 --out " + (dir / "m.off").string()) == 0);
  const auto m = load_off((dir / "m.off").string());
  CHECK(m.num_triangles() == 80u);
}

TEST_CASE("run, compare and render") {
  const auto dir = scratch("run");
  const std::string out = (dir / "a").string();
  REQUIRE(cli("run --level 2 --pipeline aca --source p2 --output_dir " + out) == 0);
  for (const char* f : {"results.csv", "trace.csv", "blocks.svg", "mesh.off", "config.txt"}) {
    CHECK(fs::exists(dir / "a" / f));
  }
  const std::string results = (dir / "a" / "results.csv").string();
  REQUIRE(cli("compare " + results + " " + results + " --out " + (dir / "cmp.csv").string()) == 0);
  std::istringstream cmp(slurp(dir / "cmp.csv"));
  std::string line;
  std::getline(cmp, line);
  CHECK(line == "metric,a,b,ratio");
  int rows = 0;
  while (std::getline(cmp, line)) {
    CHECK(line.substr(line.rfind(',') + 1) == "1");
    ++rows;
  }
  CHECK(rows == 4);

  // the saved configuration reproduces the run
  REQUIRE(cli("run --config " + (dir / "a" / "config.txt").string() + " --output_dir " +
              (dir / "b").string()) == 0);
  std::ifstream fa(results), fb(dir / "b" / "results.csv");
  const auto sa = read_results_csv(fa), sb = read_results_csv(fb);
  CHECK(sa.e_h == sb.e_h);
  CHECK(sa.entries == sb.entries);
  CHECK(sa.storage_mb == sb.storage_mb);
  CHECK(sa.cg_iterations == sb.cg_iterations);

  REQUIRE(cli("render --level 1 --pipeline aca --out " + (dir / "r.svg").string()) == 0);
  CHECK(slurp(dir / "r.svg").rfind("<svg", 0) == 0);
  CHECK(cli("render --level 1 --pipeline dense --out " + (dir / "r.svg").string()) == 2);
  CHECK(cli("compare " + results + " " + (dir / "missing.csv").string()) == 1);
}

TEST_CASE("block rectangles tile the matrix") {
  const auto mesh = generate_icosphere(2);
  const auto res = run_pipeline(small_config(Pipeline::aca), mesh);
  const std::regex rect(R"re(<rect x="(\d+)" y="(\d+)" width="(\d+)" height="(\d+)" fill="(#[0-9a-f]+)")re");
  long area = 0;
  int red = 0, green = 0;
  for (auto it = std::sregex_iterator(res.svg.begin(), res.svg.end(), rect);
       it != std::sregex_iterator(); ++it) {
    area += std::stol((*it)[3]) * std::stol((*it)[4]);
    ((*it)[5] == "#d62728" ? red : green) += 1;
  }
  CHECK(area == 320L * 320L);
  CHECK(red > 0);
  CHECK(green > 0);

  auto single = small_config(Pipeline::aca);
  single.level = 1;
  single.b_min = 100;
  const auto one = run_pipeline(single, generate_icosphere(1));
  CHECK(std::regex_search(one.svg, std::regex(R"(<rect x="0" y="0" width="80" height="80" fill="#d62728")")));
}

TEST_CASE("results CSV round trip") {
  RunSummary s;
  s.pipeline = "baca";
  s.n = 1280;
  s.e_h = 0.123456789;
  s.storage_mb = 3.5;
  s.entries = 123456;
  s.cg_iterations = 77;
  s.converged = false;
  std::stringstream io;
  write_results_csv(s, io);
  const auto back = read_results_csv(io);
  CHECK(back.pipeline == "baca");
  CHECK(back.n == 1280);
  CHECK(back.e_h == s.e_h);
  CHECK(back.entries == s.entries);
  CHECK_FALSE(back.converged);
  std::istringstream bad("N,e_h\n1,2,3\n");
  CHECK_THROWS_AS(read_results_csv(bad), FormatError);
  RunSummary other = s;
  other.n = 320;
  CHECK_THROWS_AS(compare(s, other), PreconditionError);
}

TEST_CASE("pipelines agree at N = 320") {
  const auto mesh = generate_icosphere(2);
  const auto dense = run_pipeline(small_config(Pipeline::dense), mesh);
  auto acfg = small_config(Pipeline::aca);
  acfg.eps_aca = 1e-8;
  const auto aca = run_pipeline(acfg, mesh);
  auto bcfg = small_config(Pipeline::baca);
  bcfg.eps_baca = 1e-6;
  const auto baca = run_pipeline(bcfg, mesh);
  CHECK(dense.summary.entries == 320u * 320u);
  CHECK(std::abs(aca.summary.e_h - dense.summary.e_h) <= 1e-3);
  CHECK(std::abs(baca.summary.e_h - dense.summary.e_h) <= 1e-3);
  CHECK(aca.summary.storage_mb <= dense.summary.storage_mb);
}

TEST_CASE("ACA storage does not depend on the right-hand side") {
  const auto mesh = generate_icosphere(3);
  RunConfig cfg;
  cfg.pipeline = Pipeline::aca;
  cfg.source = benchmark_source(1);
  const auto a = run_pipeline(cfg, mesh).summary;
  cfg.source = benchmark_source(4);
  const auto b = run_pipeline(cfg, mesh).summary;
  CHECK(a.storage_mb == b.storage_mb);
  CHECK(a.entries == b.entries);
  CHECK(a.avg_rank_ak == b.avg_rank_ak);
  CHECK(a.e_h != b.e_h);
}

TEST_CASE("default ellipsoid size") {
  RunConfig c;
  c.geometry = "ellipsoid";
  const auto m = build_mesh(c);
  CHECK(m.num_triangles() >= 3000u);
  CHECK(m.num_triangles() <= 4000u);
}
