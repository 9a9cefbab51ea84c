#include "baca/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "baca/clustering.hpp"
#include "baca/errors.hpp"
#include "baca/solver.hpp"

namespace baca {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(out)) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end || out < INT32_MIN || out > INT32_MAX) {
    throw ConfigError(key + ": not an integer: '" + v + "'");
  }
  return static_cast<int>(out);
}

Vec3 to_vec3(const std::string& key, const std::string& v) {
  Vec3 out;
  std::stringstream ss(v);
  std::string part;
  int k = 0;
  while (std::getline(ss, part, ',')) {
    if (k == 3) throw ConfigError(key + ": expected three comma-separated values");
    out[k++] = to_double(key, trim(part));
  }
  if (k != 3) throw ConfigError(key + ": expected three comma-separated values");
  return out;
}

std::string vec3_text(const Vec3& v) { return fmt(v[0]) + "," + fmt(v[1]) + "," + fmt(v[2]); }

const char* pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::aca: return "aca";
    case Pipeline::baca: return "baca";
    case Pipeline::dense: return "dense";
  }
  return "?";
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field number(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            if constexpr (std::is_same_v<T, double>) {
              c.*member = to_double(k, v);
            } else if constexpr (std::is_same_v<T, unsigned>) {
              const int i = to_int(k, v);
              if (i < 0) throw ConfigError(k + ": must be non-negative");
              c.*member = static_cast<unsigned>(i);
            } else {
              c.*member = to_int(k, v);
            }
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_same_v<T, double>) return fmt(c.*member);
            else return std::to_string(c.*member);
          }};
}

template <class T>
Field quad(T QuadratureOptions::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            if constexpr (std::is_same_v<T, double>) c.quadrature.*member = to_double(k, v);
            else c.quadrature.*member = to_int(k, v);
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_same_v<T, double>) return fmt(c.quadrature.*member);
            else return std::to_string(c.quadrature.*member);
          }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("geometry",
                   Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                           if (v != "icosphere" && v != "ellipsoid" && v != "off") {
                             throw ConfigError(k + ": expected icosphere, ellipsoid or off");
                           }
                           c.geometry = v;
                         },
                         [](const RunConfig& c) { return c.geometry; }});
    t.emplace_back("level", number(&RunConfig::level));
    t.emplace_back("radius", number(&RunConfig::radius));
    t.emplace_back("semiaxes",
                   Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                           c.semiaxes = to_vec3(k, v);
                         },
                         [](const RunConfig& c) { return vec3_text(c.semiaxes); }});
    t.emplace_back("refine_rounds", number(&RunConfig::refine_rounds));
    t.emplace_back("refine_band", number(&RunConfig::refine_band));
    t.emplace_back("off_path", Field{[](RunConfig& c, const std::string&, const std::string& v) {
                                       c.off_path = v;
                                     },
                                     [](const RunConfig& c) { return c.off_path; }});
    t.emplace_back("source",
                   Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                           if (v.size() == 2 && v[0] == 'p' && v[1] >= '1' && v[1] <= '4') {
                             c.source = benchmark_source(v[1] - '0');
                           } else {
                             c.source = to_vec3(k, v);
                           }
                         },
                         [](const RunConfig& c) { return vec3_text(c.source); }});
    t.emplace_back("pipeline",
                   Field{[](RunConfig& c, const std::string& k, const std::string& v) {
                           if (v == "aca") c.pipeline = Pipeline::aca;
                           else if (v == "baca") c.pipeline = Pipeline::baca;
                           else if (v == "dense") c.pipeline = Pipeline::dense;
                           else throw ConfigError(k + ": expected aca, baca or dense");
                         },
                         [](const RunConfig& c) { return std::string(pipeline_name(c.pipeline)); }});
    t.emplace_back("b_min", number(&RunConfig::b_min));
    t.emplace_back("beta", number(&RunConfig::beta));
    t.emplace_back("eps_aca", number(&RunConfig::eps_aca));
    t.emplace_back("eps_baca", number(&RunConfig::eps_baca));
    t.emplace_back("theta", number(&RunConfig::theta));
    t.emplace_back("alpha", number(&RunConfig::alpha));
    t.emplace_back("lookahead", number(&RunConfig::lookahead));
    t.emplace_back("initial_rank", number(&RunConfig::initial_rank));
    t.emplace_back("max_outer", number(&RunConfig::max_outer));
    t.emplace_back("cg_tol", number(&RunConfig::cg_tol));
    t.emplace_back("cg_max_iter", number(&RunConfig::cg_max_iter));
    t.emplace_back("quad_outer_points", quad(&QuadratureOptions::outer_points));
    t.emplace_back("quad_near_depth", quad(&QuadratureOptions::near_depth));
    t.emplace_back("quad_near_factor", quad(&QuadratureOptions::near_factor));
    t.emplace_back("quad_rhs_points", quad(&QuadratureOptions::rhs_points));
    t.emplace_back("quad_rhs_depth", quad(&QuadratureOptions::rhs_depth));
    t.emplace_back("quad_error_points", quad(&QuadratureOptions::error_points));
    t.emplace_back("output_dir", Field{[](RunConfig& c, const std::string&, const std::string& v) {
                                         c.output_dir = v;
                                       },
                                       [](const RunConfig& c) { return c.output_dir; }});
    t.emplace_back("threads", number(&RunConfig::threads));
    t.emplace_back("seed", number(&RunConfig::seed));
    return t;
  }();
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& [k, f] : fields()) {
    if (k == key) return f;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

bool valid_rule(int points) {
  return points == 1 || points == 3 || points == 6 || points == 7 || points == 12;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr double kMiB = 1024.0 * 1024.0;

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  for (const auto& [k, f] : fields()) {
    if (f.get(*this) != f.get(o)) return false;
  }
  return true;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  field(key).set(cfg, key, trim(value));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  return field(key).get(cfg);
}

void validate(const RunConfig& c) {
  require(c.level >= 0 && c.level <= 7, "level must lie in [0, 7]");
  require(c.radius > 0.0, "radius must be positive");
  require((c.semiaxes.array() > 0.0).all(), "semiaxes must be positive");
  require(c.refine_rounds >= 0 && c.refine_rounds <= 6, "refine_rounds must lie in [0, 6]");
  require(c.refine_band > 0.0, "refine_band must be positive");
  require(c.geometry != "off" || !c.off_path.empty(), "geometry=off needs off_path");
  require(c.b_min >= 1, "b_min must be positive");
  require(c.beta > 0.0 && c.beta < 1.0, "beta must lie in (0, 1)");
  require(c.eps_aca > 0.0, "eps_aca must be positive");
  require(c.eps_baca > 0.0, "eps_baca must be positive");
  require(c.theta > 0.0 && c.theta < 1.0, "theta must lie in (0, 1)");
  require(c.alpha >= 0.0, "alpha must be non-negative");
  require(c.lookahead >= 1, "lookahead must be positive");
  require(c.initial_rank >= 0, "initial_rank must be non-negative");
  require(c.max_outer >= 1, "max_outer must be positive");
  require(c.cg_tol > 0.0, "cg_tol must be positive");
  require(c.cg_max_iter >= 1, "cg_max_iter must be positive");
  const auto& q = c.quadrature;
  require(valid_rule(q.outer_points) && valid_rule(q.rhs_points) && valid_rule(q.error_points),
          "quadrature rules must use 1, 3, 6, 7 or 12 points");
  require(q.near_depth >= 0 && q.near_depth <= 5, "quad_near_depth must lie in [0, 5]");
  require(q.rhs_depth >= 0 && q.rhs_depth <= 6, "quad_rhs_depth must lie in [0, 6]");
  require(q.near_factor >= 0.0, "quad_near_factor must be non-negative");
  require(c.threads >= 1, "threads must be positive");
}

RunConfig parse_config(std::istream& in, RunConfig cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : fields()) out += k + " = " + f.get(cfg) + "\n";
  return out;
}

Vec3 benchmark_source(int i) {
  static constexpr double x[] = {10.0, 1.5, 1.1, 1.05};
  if (i < 1 || i > 4) throw RangeError("source index must be 1..4");
  return {x[i - 1], 0.0, 0.0};
}

TriMesh build_mesh(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.geometry == "off") return load_off(cfg.off_path);
  if (cfg.geometry == "icosphere") return generate_icosphere(cfg.level, cfg.radius);
  TriMesh m = map_to_ellipsoid(generate_icosphere(cfg.level, 1.0), cfg.semiaxes);
  const double band = cfg.refine_band;
  return refine_region(m, [band](const Vec3& c) { return std::abs(c[2]) < band; },
                       cfg.refine_rounds);
}

namespace {

void fill_storage(RunSummary& s, const HMatrix& h) {
  const auto st = storage_stats(h);
  s.storage_mb = st.bytes / kMiB;
  s.storage_symmetric_mb = st.bytes_symmetric / kMiB;
  s.compression_percent = st.compression_percent;
  s.avg_rank_ak = st.avg_rank_ak;
  s.avg_rank_ahat = st.avg_rank_ahat;
  s.entries = st.entries;
}

}  // namespace

RunOutput run_pipeline(const RunConfig& cfg, const TriMesh& mesh) {
  validate(cfg);
  RunOutput out;
  RunSummary& s = out.summary;
  s.pipeline = pipeline_name(cfg.pipeline);
  s.n = static_cast<int>(mesh.num_triangles());

  const DirichletProblem prob(mesh, cfg.source);
  const Eigen::VectorXd b = assemble_rhs(mesh, prob, cfg.quadrature, cfg.threads);
  const LaplaceSLP op(mesh, cfg.quadrature);
  const EntryOracle oracle = [&op](int i, int j) { return op.entry(i, j); };

  if (cfg.pipeline == Pipeline::dense) {
    auto t0 = std::chrono::steady_clock::now();
    const Eigen::MatrixXd a = assemble_dense(op, cfg.threads);
    s.assembly_seconds = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw std::runtime_error("dense matrix is not SPD");
    out.solution = llt.solve(b);
    s.solve_seconds = seconds_since(t0);
    s.final_residual = (b - a * out.solution).norm();
    const double bytes = 8.0 * s.n * static_cast<double>(s.n);
    s.storage_mb = bytes / kMiB;
    s.storage_symmetric_mb = 8.0 * s.n * (s.n + 1.0) / 2.0 / kMiB;
    s.compression_percent = 100.0;
    s.entries = static_cast<std::size_t>(s.n) * s.n;
  } else {
    const BlockPartition partition =
        build_partition(build_cluster_tree(mesh, cfg.b_min), cfg.beta);
    if (cfg.pipeline == Pipeline::aca) {
      auto t0 = std::chrono::steady_clock::now();
      HMatrix h(partition, oracle, 1, cfg.threads);
      h.compress_all(cfg.eps_aca, cfg.beta);
      s.assembly_seconds = seconds_since(t0);
      t0 = std::chrono::steady_clock::now();
      const auto cg = cg_solve([&h](const Eigen::VectorXd& v) { return matvec(h, v, MatvecMode::Ak); },
                               b, Eigen::VectorXd::Zero(b.size()), cfg.cg_tol, cfg.cg_max_iter);
      s.solve_seconds = seconds_since(t0);
      out.solution = cg.x;
      s.final_residual = cg.residual;
      s.cg_iterations = cg.iterations;
      s.converged = cg.converged;
      fill_storage(s, h);
      out.svg = render_partition_svg(h);
    } else {
      BacaParams p;
      p.theta = cfg.theta;
      p.eps_baca = cfg.eps_baca;
      p.alpha = cfg.alpha;
      p.lookahead = cfg.lookahead;
      p.initial_rank = cfg.initial_rank;
      p.max_outer = cfg.max_outer;
      p.cg_max_iter = cfg.cg_max_iter;
      p.beta = cfg.beta;
      p.threads = cfg.threads;
      const auto res = baca_solve(oracle, b, partition, p);
      out.solution = res.x;
      out.trace = res.trace;
      s.final_residual = res.final_residual;
      s.cg_iterations = res.cg_iterations;
      s.outer_iterations = static_cast<int>(res.trace.size());
      s.converged = res.converged;
      s.assembly_seconds = res.assembly_seconds;
      s.solve_seconds = res.seconds - res.assembly_seconds;
      fill_storage(s, res.h);
      out.svg = render_partition_svg(res.h);
    }
  }
  s.wall_seconds = s.assembly_seconds + s.solve_seconds;
  s.e_h = relative_l2_error(mesh, out.solution, prob, cfg.quadrature);
  return out;
}

RunOutput run(const RunConfig& cfg) {
  validate(cfg);
  const TriMesh mesh = build_mesh(cfg);
  RunOutput out = run_pipeline(cfg, mesh);
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  save_off(mesh, (dir / "mesh.off").string());
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("results.csv");
    write_results_csv(out.summary, f);
  }
  {
    auto f = open("trace.csv");
    write_trace_csv(out.trace, f);
  }
  if (!out.svg.empty()) {
    auto f = open("blocks.svg");
    f << out.svg;
  }
  {
    auto f = open("config.txt");
    f << serialize_config(cfg);
  }
  return out;
}

std::string results_csv_header() {
  return "N,e_h,final_residual,storage_mb,compression_percent,avg_rank_ak,avg_rank_ahat,"
         "entries,cg_iterations,outer_iterations,wall_seconds,pipeline,storage_symmetric_mb,"
         "assembly_seconds,solve_seconds,converged";
}

std::string results_csv_row(const RunSummary& s) {
  std::ostringstream o;
  o << s.n << ',' << fmt(s.e_h) << ',' << fmt(s.final_residual) << ',' << fmt(s.storage_mb) << ','
    << fmt(s.compression_percent) << ',' << fmt(s.avg_rank_ak) << ',' << fmt(s.avg_rank_ahat)
    << ',' << s.entries << ',' << s.cg_iterations << ',' << s.outer_iterations << ','
    << fmt(s.wall_seconds) << ',' << s.pipeline << ',' << fmt(s.storage_symmetric_mb) << ','
    << fmt(s.assembly_seconds) << ',' << fmt(s.solve_seconds) << ',' << (s.converged ? 1 : 0);
  return o.str();
}

void write_results_csv(const RunSummary& s, std::ostream& out) {
  out << results_csv_header() << '\n' << results_csv_row(s) << '\n';
}

RunSummary read_results_csv(std::istream& in) {
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row)) {
    throw FormatError("results.csv needs a header and one data row");
  }
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(trim(line));
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(trim(c));
    return cells;
  };
  const auto keys = split(header), vals = split(row);
  if (keys.size() != vals.size()) throw FormatError("results.csv: header and row differ in width");
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < keys.size(); ++i) m[keys[i]] = vals[i];
  auto get = [&](const std::string& k) -> const std::string& {
    auto it = m.find(k);
    if (it == m.end()) throw FormatError("results.csv: missing column " + k);
    return it->second;
  };
  auto num = [&](const std::string& k) {
    try {
      return to_double(k, get(k));
    } catch (const ConfigError& e) {
      throw FormatError(std::string("results.csv: ") + e.what());
    }
  };
  RunSummary s;
  s.n = static_cast<int>(num("N"));
  s.e_h = num("e_h");
  s.final_residual = num("final_residual");
  s.storage_mb = num("storage_mb");
  s.compression_percent = num("compression_percent");
  s.avg_rank_ak = num("avg_rank_ak");
  s.avg_rank_ahat = num("avg_rank_ahat");
  s.entries = static_cast<std::size_t>(num("entries"));
  s.cg_iterations = static_cast<int>(num("cg_iterations"));
  s.outer_iterations = static_cast<int>(num("outer_iterations"));
  s.wall_seconds = num("wall_seconds");
  if (m.count("pipeline")) s.pipeline = m["pipeline"];
  if (m.count("storage_symmetric_mb")) s.storage_symmetric_mb = num("storage_symmetric_mb");
  if (m.count("assembly_seconds")) s.assembly_seconds = num("assembly_seconds");
  if (m.count("solve_seconds")) s.solve_seconds = num("solve_seconds");
  if (m.count("converged")) s.converged = num("converged") != 0.0;
  return s;
}

void write_trace_csv(const std::vector<BacaIteration>& trace, std::ostream& out) {
  out << "k,eta,delta,w_norm,abs_tol,tightenings,marked,active_blocks,cg_iterations,entries,"
         "storage_bytes,seconds\n";
  for (const auto& t : trace) {
    out << t.k << ',' << fmt(t.eta) << ',' << fmt(t.delta) << ',' << fmt(t.w_norm) << ','
        << fmt(t.abs_tol) << ',' << t.tightenings << ',' << t.marked << ',' << t.active_blocks
        << ',' << t.cg_iterations << ',' << t.entries << ',' << t.storage_bytes << ','
        << fmt(t.seconds) << '\n';
  }
}

std::string render_partition_svg(const HMatrix& h) {
  const int n = h.size();
  if (n > 100000) throw SizeError("partition rendering is limited to N <= 1e5");
  const auto& p = h.partition();
  const auto& tree = p.tree;
  std::vector<int> slot_of(p.blocks.size(), -1);
  for (int s = 0; s < h.num_admissible(); ++s) {
    slot_of[&h.admissible_block(s) - p.blocks.data()] = s;
  }
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << n << ' ' << n
    << "\" width=\"800\" height=\"800\">\n";
  const double stroke = std::max(n / 1000.0, 0.05);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& blk = p.blocks[b];
    const auto& r = tree.node(blk.row);
    const auto& c = tree.node(blk.col);
    const bool adm = blk.admissible;
    o << "<rect x=\"" << c.begin << "\" y=\"" << r.begin << "\" width=\"" << c.size()
      << "\" height=\"" << r.size() << "\" fill=\"" << (adm ? "#2ca02c" : "#d62728")
      << "\" stroke=\"black\" stroke-width=\"" << fmt(stroke) << "\"/>\n";
    if (adm) {
      const int rank = h.split(slot_of[b]).ahead;
      const double font = 0.5 * std::min(r.size(), c.size());
      o << "<text x=\"" << fmt(c.begin + 0.5 * c.size()) << "\" y=\""
        << fmt(r.begin + 0.5 * r.size() + 0.35 * font) << "\" font-size=\"" << fmt(font)
        << "\" text-anchor=\"middle\">" << rank << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

void render_partition_svg(const HMatrix& h, const std::string& path) {
  const std::string svg = render_partition_svg(h);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << svg;
}

std::vector<RatioRow> compare(const RunSummary& a, const RunSummary& b) {
  if (a.n != b.n) throw PreconditionError("compare: runs differ in N");
  auto row = [](std::string name, double x, double y) {
    const double ratio = x == 0.0 ? (y == 0.0 ? 1.0 : INFINITY) : y / x;
    return RatioRow{std::move(name), x, y, ratio};
  };
  return {row("time", a.wall_seconds, b.wall_seconds),
          row("storage", a.storage_mb, b.storage_mb),
          row("entries", static_cast<double>(a.entries), static_cast<double>(b.entries)),
          row("cg_iterations", a.cg_iterations, b.cg_iterations)};
}

void write_comparison_csv(const std::vector<RatioRow>& rows, std::ostream& out) {
  out << "metric,a,b,ratio\n";
  for (const auto& r : rows) {
    out << r.metric << ',' << fmt(r.a) << ',' << fmt(r.b) << ',' << fmt(r.ratio) << '\n';
  }
}

}  // namespace baca
