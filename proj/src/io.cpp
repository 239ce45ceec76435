#include "tumorbif/io.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "tumorbif/errors.hpp"
#include "tumorbif/geometry.hpp"
#include "tumorbif/version.hpp"

namespace tumorbif::io {

namespace fs = std::filesystem;

double unit_radius_A() {
  return 2.0 * boost::math::cyl_bessel_i(1.0, 1.0) / boost::math::cyl_bessel_i(0.0, 1.0);
}

NutrientFn ModelConfig::nutrient() const {
  if (f_kind == "identity") return NutrientFn::identity();
  if (f_kind == "michaelis_menten") return NutrientFn::michaelis_menten(sigma);
  throw ConfigError("model.f must be \"identity\" or \"michaelis_menten\", got \"" + f_kind + "\"");
}

namespace {

template <class T>
void require_range(const char* name, T v, T lo, T hi) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << name << " = " << v << " is outside [" << lo << ", " << hi << "]";
    throw ConfigError(os.str());
  }
}

void require_positive(const char* name, double v) {
  if (!(v > 0.0)) {
    std::ostringstream os;
    os << name << " = " << v << " must be positive";
    throw ConfigError(os.str());
  }
}

}  // namespace

void RunConfig::validate() const {
  try {
    ModelParams p;
    p.A = model.resolved_A();
    p.f = model.nutrient();
    validate_params(p);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (model.G && !std::isfinite(*model.G)) throw ConfigError("model.G must be finite");
  require_range("numerics.radial_grid", numerics.radial_grid, 16, 4096);
  require_range("numerics.n_r", numerics.n_r, 32, 256);
  require_range("numerics.n_theta", numerics.n_theta, 64, 1024);
  if (numerics.n_theta % 2) throw ConfigError("numerics.n_theta must be even");
  require_range("numerics.K", numerics.K, 0, 16);
  require_range("numerics.k_max", numerics.k_max, 2, 1024);
  require_positive("numerics.ode_tol", numerics.ode_tol);
  require_positive("numerics.field_tol", numerics.field_tol);
  require_positive("numerics.linear_tol", numerics.linear_tol);
  require_positive("numerics.continuation_tol", numerics.continuation_tol);
  require_range("task.l", task.l, 1, 64);
  require_range("task.k", task.k, 0, 64);
  require_range("task.count", task.count, 1, 256);
  require_range("task.eps_max", std::abs(task.eps_max), 0.0, 0.2);
  require_range("task.steps", task.steps, 1, 1000);
  require_range("task.fd_eps", task.fd_eps, 1e-5, 1e-2);
  require_positive("task.multiplier_bound", task.multiplier_bound);
  require_range("task.attempts", task.attempts, 1, 1000);
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

FieldOptions RunConfig::field_options() const {
  FieldOptions o;
  o.grid = {numerics.n_r, numerics.n_theta};
  o.newton_tol = numerics.field_tol;
  o.linear_tol = numerics.linear_tol;
  return o;
}

ContinuationOptions RunConfig::continuation_options() const {
  ContinuationOptions o;
  o.field = field_options();
  o.K = numerics.K;
  o.tol = numerics.continuation_tol;
  return o;
}

RadialOptions RunConfig::radial_options() const {
  RadialOptions o;
  o.grid_size = numerics.radial_grid;
  o.ode_tol = numerics.ode_tol;
  return o;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["model"]["A"] = c.model.resolved_A();
  j["model"]["G"] = c.model.G ? Json(*c.model.G) : Json(nullptr);
  j["model"]["f"] = c.model.f_kind;
  j["model"]["sigma"] = c.model.sigma;
  const auto& n = c.numerics;
  j["numerics"] = {{"radial_grid", n.radial_grid},   {"n_r", n.n_r},
                   {"n_theta", n.n_theta},           {"K", n.K},
                   {"k_max", n.k_max},               {"ode_tol", n.ode_tol},
                   {"field_tol", n.field_tol},       {"linear_tol", n.linear_tol},
                   {"continuation_tol", n.continuation_tol}};
  const auto& t = c.task;
  j["task"] = {{"l", t.l},
               {"k", t.k},
               {"count", t.count},
               {"eps_max", t.eps_max},
               {"steps", t.steps},
               {"fd_eps", t.fd_eps},
               {"multiplier_bound", t.multiplier_bound},
               {"attempts", t.attempts},
               {"seed", t.seed},
               {"branch_files", t.branch_files}};
  j["out_dir"] = c.out_dir;
  return j;
}

namespace {

template <class T>
void read_field(const Json& obj, const char* section, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: ") + section + "." + key + " has the wrong type");
  }
}

void reject_unknown(const Json& obj, const char* section, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(std::string("config: ") + section + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw ConfigError(std::string("config: unknown key ") + section + "." + it.key());
  }
}

}  // namespace

RunConfig config_from_json(const Json& j, RunConfig c) {
  reject_unknown(j, "<root>", {"model", "numerics", "task", "out_dir"});
  if (j.contains("model")) {
    const Json& m = j["model"];
    reject_unknown(m, "model", {"A", "G", "f", "sigma"});
    read_field(m, "model", "A", c.model.A);
    if (m.contains("G")) {
      if (m["G"].is_null())
        c.model.G.reset();
      else if (m["G"].is_number())
        c.model.G = m["G"].get<double>();
      else
        throw ConfigError("config: model.G has the wrong type");
    }
    read_field(m, "model", "f", c.model.f_kind);
    read_field(m, "model", "sigma", c.model.sigma);
  }
  if (j.contains("numerics")) {
    const Json& n = j["numerics"];
    reject_unknown(n, "numerics", {"radial_grid", "n_r", "n_theta", "K", "k_max", "ode_tol",
                                   "field_tol", "linear_tol", "continuation_tol"});
    read_field(n, "numerics", "radial_grid", c.numerics.radial_grid);
    read_field(n, "numerics", "n_r", c.numerics.n_r);
    read_field(n, "numerics", "n_theta", c.numerics.n_theta);
    read_field(n, "numerics", "K", c.numerics.K);
    read_field(n, "numerics", "k_max", c.numerics.k_max);
    read_field(n, "numerics", "ode_tol", c.numerics.ode_tol);
    read_field(n, "numerics", "field_tol", c.numerics.field_tol);
    read_field(n, "numerics", "linear_tol", c.numerics.linear_tol);
    read_field(n, "numerics", "continuation_tol", c.numerics.continuation_tol);
  }
  if (j.contains("task")) {
    const Json& t = j["task"];
    reject_unknown(t, "task", {"l", "k", "count", "eps_max", "steps", "fd_eps", "multiplier_bound",
                               "attempts", "seed", "branch_files"});
    read_field(t, "task", "l", c.task.l);
    read_field(t, "task", "k", c.task.k);
    read_field(t, "task", "count", c.task.count);
    read_field(t, "task", "eps_max", c.task.eps_max);
    read_field(t, "task", "steps", c.task.steps);
    read_field(t, "task", "fd_eps", c.task.fd_eps);
    read_field(t, "task", "multiplier_bound", c.task.multiplier_bound);
    read_field(t, "task", "attempts", c.task.attempts);
    read_field(t, "task", "seed", c.task.seed);
    read_field(t, "task", "branch_files", c.task.branch_files);
  }
  read_field(j, "<root>", "out_dir", c.out_dir);
  return c;
}

RunConfig load_config(const fs::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

Json to_json(const ResultFile& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["command"] = r.command;
  j["config"] = r.config;
  j["payload"] = r.payload;
  j["provenance"] = {{"n_r", r.provenance.n_r},
                     {"n_theta", r.provenance.n_theta},
                     {"radial_grid", r.provenance.radial_grid},
                     {"tolerances", r.provenance.tolerances},
                     {"wall_time_s", r.provenance.wall_time_s},
                     {"library_version", r.provenance.library_version}};
  return j;
}

ResultFile result_from_json(const Json& j) {
  try {
    ResultFile r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion)
      throw ConfigError("unsupported result schema version " + std::to_string(r.schema_version));
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    r.payload = j.at("payload");
    const Json& p = j.at("provenance");
    r.provenance.n_r = p.at("n_r").get<int>();
    r.provenance.n_theta = p.at("n_theta").get<int>();
    r.provenance.radial_grid = p.at("radial_grid").get<int>();
    r.provenance.tolerances = p.at("tolerances");
    r.provenance.wall_time_s = p.at("wall_time_s").get<double>();
    r.provenance.library_version = p.at("library_version").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed result file: ") + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void write_result(const ResultFile& r, const fs::path& path) {
  write_text(path, to_json(r).dump(2) + "\n");
}

ResultFile read_result(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open result file " + path.string());
  try {
    return result_from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("result file " + path.string() + " is not valid JSON: " + e.what());
  }
}

Json to_json(const Branch& b) {
  Json j;
  j["l"] = b.l;
  j["k"] = b.k;
  j["G_kl"] = b.G_kl;
  j["points"] = Json::array();
  for (const auto& p : b.points)
    j["points"].push_back({{"eps", p.eps},
                           {"G", p.G},
                           {"coefficients", p.rho.a},
                           {"residual", p.residual},
                           {"iterations", p.iterations}});
  j["warnings"] = b.warnings;
  return j;
}

Branch branch_from_json(const Json& j) {
  try {
    Branch b;
    b.l = j.at("l").get<int>();
    b.k = j.at("k").get<int>();
    b.G_kl = j.at("G_kl").get<double>();
    for (const Json& p : j.at("points")) {
      BranchPoint bp;
      bp.eps = p.at("eps").get<double>();
      bp.G = p.at("G").get<double>();
      bp.rho.l = b.l;
      bp.rho.a = p.at("coefficients").get<std::vector<double>>();
      bp.residual = p.at("residual").get<double>();
      bp.iterations = p.value("iterations", 0);
      b.points.push_back(std::move(bp));
    }
    b.warnings = j.value("warnings", std::vector<std::string>{});
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed branch record: ") + e.what());
  }
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw Error("CSV row width does not match the header");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  write_text(path, os.str());
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Frame {
  double x0, x1, y0, y1;
  double width = 720, height = 480, margin = 60;

  double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
  double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

std::string svg_header(double w, double h) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

}  // namespace

void emit_diagram(const std::vector<BifurcationPoint>& points,
                  const std::vector<DiagramBranch>& branches, const fs::path& path) {
  if (points.empty() && branches.empty())
    throw DomainError("diagram needs at least one catalog point or branch");
  double gmin = std::numeric_limits<double>::infinity();
  double gmax = -gmin;
  double emax = 0.0;
  for (const auto& p : points) {
    gmin = std::min(gmin, p.G);
    gmax = std::max(gmax, p.G);
  }
  for (const auto& b : branches)
    for (const auto& p : b.branch.points) {
      gmin = std::min(gmin, p.G);
      gmax = std::max(gmax, p.G);
      emax = std::max(emax, std::abs(p.eps));
    }
  if (emax == 0.0) emax = 0.05;
  const double span = gmax > gmin ? gmax - gmin : std::max(1.0, std::abs(gmax));
  Frame fr{gmin - 0.08 * span, gmax + 0.08 * span, -1.15 * emax, 1.15 * emax};

  std::ostringstream os;
  os << std::setprecision(8) << svg_header(fr.width, fr.height);
  // axes: the trivial branch is eps = 0
  os << "<line x1=\"" << fr.px(fr.x0) << "\" y1=\"" << fr.py(0) << "\" x2=\"" << fr.px(fr.x1)
     << "\" y2=\"" << fr.py(0) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  os << "<line x1=\"" << fr.margin << "\" y1=\"" << fr.margin << "\" x2=\"" << fr.margin
     << "\" y2=\"" << fr.height - fr.margin << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << fr.width / 2 << "\" y=\"" << fr.height - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">G</text>\n";
  os << "<text x=\"20\" y=\"" << fr.height / 2 << "\" transform=\"rotate(-90 20 " << fr.height / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">amplitude</text>\n";
  for (double y : {-emax, emax}) {
    os << "<text x=\"" << fr.margin - 6 << "\" y=\"" << fr.py(y) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << y << "</text>\n";
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const BifurcationPoint& p = points[i];
    os << "<circle class=\"bifurcation-point\" cx=\"" << fr.px(p.G) << "\" cy=\"" << fr.py(0)
       << "\" r=\"4\" fill=\"" << (p.within_theorem ? "black" : "gray") << "\"/>\n";
    os << "<text x=\"" << fr.px(p.G) << "\" y=\"" << fr.py(0) + 18 + 14 * (i % 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">G" << p.mode
       << "=" << std::setprecision(6) << p.G << std::setprecision(8) << "</text>\n";
  }
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto& b = branches[i];
    const char* color = kPalette[i % std::size(kPalette)];
    os << "<polyline class=\"branch\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : b.branch.points) os << fr.px(p.G) << ',' << fr.py(p.eps) << ' ';
    os << "\"/>\n";
    for (const auto& p : b.branch.points)
      os << "<circle cx=\"" << fr.px(p.G) << "\" cy=\"" << fr.py(p.eps) << "\" r=\"2\" fill=\""
         << color << "\"/>\n";
    os << "<text x=\"" << fr.width - fr.margin << "\" y=\"" << fr.margin + 16 * i
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
       << "\">" << b.label << "</text>\n";
  }
  os << "</svg>\n";
  write_text(path, os.str());
}

void emit_outlines(const Branch& branch, double R_A, const fs::path& path, int max_curves) {
  if (branch.points.empty()) throw DomainError("outline snapshot needs a nonempty branch");
  if (max_curves < 1) throw DomainError("max_curves must be >= 1");
  const int n = static_cast<int>(branch.points.size());
  std::vector<int> pick;
  const int m = std::min(max_curves, n);
  for (int i = 0; i < m; ++i) pick.push_back(m == 1 ? 0 : (n - 1) * i / (m - 1));
  pick.erase(std::unique(pick.begin(), pick.end()), pick.end());

  double extent = 0.0;
  std::vector<std::vector<std::array<double, 2>>> curves;
  for (int i : pick) {
    curves.push_back(outline(branch.points[i].rho, R_A, 256));
    for (const auto& q : curves.back()) extent = std::max({extent, std::abs(q[0]), std::abs(q[1])});
  }
  const double size = 480;
  const double scale = 0.42 * size / extent;
  std::ostringstream os;
  os << std::setprecision(8) << svg_header(size, size);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % std::size(kPalette)];
    os << "<polygon class=\"outline\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& q : curves[c]) os << size / 2 + scale * q[0] << ',' << size / 2 - scale * q[1] << ' ';
    os << "\"/>\n";
    os << "<text x=\"10\" y=\"" << 20 + 16 * c << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
       << color << "\">eps=" << branch.points[pick[c]].eps << " G=" << branch.points[pick[c]].G
       << "</text>\n";
  }
  os << "</svg>\n";
  write_text(path, os.str());
}

}  // namespace tumorbif::io
