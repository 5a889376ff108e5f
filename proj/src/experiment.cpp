#include "rtrecover/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "rtrecover/mesh_generators.hpp"

namespace rtrecover {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw std::invalid_argument(key + ": not a number: '" + text + "'");
  return v;
}

long parse_integer(const std::string& key, const std::string& text) {
  // accepts 200000 as well as 2e5
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw std::invalid_argument(key + ": not an integer: '" + text + "'");
  return static_cast<long>(v);
}

RefineMode parse_refine(const std::string& text) {
  if (text == "regular") return RefineMode::kRegular;
  if (text == "bisection") return RefineMode::kBisection;
  if (text == "adaptive") return RefineMode::kAdaptive;
  throw std::invalid_argument("refine: expected regular, bisection or adaptive, got '" + text + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem", [](RunConfig& c, const std::string& k, const std::string& v) { c.problem = parse_integer(k, v); }},
      {"r", [](RunConfig& c, const std::string& k, const std::string& v) { c.r = parse_integer(k, v); }},
      {"refine", [](RunConfig& c, const std::string&, const std::string& v) { c.refine = parse_refine(v); }},
      {"levels", [](RunConfig& c, const std::string& k, const std::string& v) { c.levels = parse_integer(k, v); }},
      {"max-ndof", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_ndof = parse_integer(k, v); }},
      {"theta", [](RunConfig& c, const std::string& k, const std::string& v) { c.theta = parse_double(k, v); }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long s = parse_integer(k, v);
         if (s < 0) throw std::invalid_argument("seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
      {"mesh", [](RunConfig& c, const std::string&, const std::string& v) { c.mesh = v; }},
      {"domain",
       [](RunConfig& c, const std::string&, const std::string& v) {
         if (v != "unit-square" && v != "slit-square")
           throw std::invalid_argument("domain: expected unit-square or slit-square, got '" + v + "'");
         c.domain = v;
       }},
      {"initial-nt",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.initial_nt = parse_integer(k, v); }},
      {"quad-degree",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.quad_degree = parse_integer(k, v); }},
      {"reaction", [](RunConfig& c, const std::string& k, const std::string& v) { c.reaction = parse_double(k, v); }},
      {"samples", [](RunConfig& c, const std::string& k, const std::string& v) { c.samples = parse_integer(k, v); }},
      {"aspect-max",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.aspect_max = parse_double(k, v); }},
  };
  return table;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  std::string k = trim(key);
  std::replace(k.begin(), k.end(), '_', '-');
  const auto it = setters().find(k);
  if (it == setters().end()) throw std::invalid_argument("unknown setting '" + key + "'");
  it->second(config, k, trim(value));
}

void load_config(RunConfig& config, std::istream& in) {
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  load_config(config, in);
}

const char* to_string(RefineMode mode) {
  switch (mode) {
    case RefineMode::kRegular: return "regular";
    case RefineMode::kBisection: return "bisection";
    case RefineMode::kAdaptive: return "adaptive";
    default: return "default";
  }
}

RunConfig resolve(RunConfig c) {
  if (c.problem < 1 || c.problem > 3) throw std::invalid_argument("problem must be 1, 2 or 3");
  if (c.r < 0 || c.r > 3) throw std::invalid_argument("r must be in 0..3");
  if (c.refine == RefineMode::kDefault) c.refine = c.problem == 3 ? RefineMode::kAdaptive : RefineMode::kRegular;
  const bool adaptive = c.refine == RefineMode::kAdaptive;
  if (c.levels == 0 && !adaptive) c.levels = 5;
  if (c.max_ndof == 0 && adaptive) c.max_ndof = 200000;
  if (c.levels < 0) throw std::invalid_argument("levels must be positive");
  if (c.max_ndof < 0) throw std::invalid_argument("max-ndof must be positive");
  if (!(c.theta > 0.0 && c.theta < 1.0)) throw std::invalid_argument("theta must be in (0, 1)");
  if (c.domain.empty()) c.domain = c.problem == 3 ? "slit-square" : "unit-square";
  if (c.problem == 3 && c.domain != "slit-square" && c.mesh.empty())
    throw std::invalid_argument("problem 3 lives on the slit square");
  if (c.initial_nt == 0) c.initial_nt = c.domain == "slit-square" ? 8 : 86;
  if (c.initial_nt < 2) throw std::invalid_argument("initial-nt too small");
  if (c.quad_degree != -1 && (c.quad_degree < 1 || c.quad_degree > 20))
    throw std::invalid_argument("quad-degree must be in 1..20");
  if (c.reaction < 0.0) throw std::invalid_argument("reaction must be nonnegative");
  if (c.problem == 3 && c.reaction != 0.0) throw std::invalid_argument("problem 3 has no reaction term");
  if (c.samples < 1) throw std::invalid_argument("samples must be positive");
  if (!(c.aspect_max >= 2.0)) throw std::invalid_argument("aspect-max must be at least 2");
  return c;
}

std::vector<OrderFit> fit_orders(const std::vector<ErrorReport>& reports) {
  const std::vector<std::pair<const char*, double ErrorReport::*>> columns = {
      {"e_p", &ErrorReport::e_p},       {"e_div", &ErrorReport::e_div},
      {"e_close", &ErrorReport::e_close}, {"e_rec", &ErrorReport::e_rec},
      {"e_u", &ErrorReport::e_u},       {"eta", &ErrorReport::eta},
      {"e_div_close", &ErrorReport::e_div_close}, {"e_u_close", &ErrorReport::e_u_close}};
  std::vector<OrderFit> fits;
  for (const auto& [name, member] : columns) {
    std::vector<double> e, n;
    for (size_t i = 1; i < reports.size(); ++i) {
      e.push_back(reports[i].*member);
      n.push_back(reports[i].ndof);
    }
    OrderFit fit{name, std::numeric_limits<double>::quiet_NaN()};
    const bool usable = e.size() >= 2 && std::all_of(e.begin(), e.end(), [](double v) { return v > 0.0; });
    if (usable) fit.order = fit_order(e, n);
    fits.push_back(fit);
  }
  return fits;
}

namespace {

ProblemSpec make_problem(const RunConfig& c) {
  return c.problem == 3 ? problem_slit() : problem_smooth(c.reaction);
}

Mesh initial_mesh(const RunConfig& c) {
  if (!c.mesh.empty()) return read_mesh_file(c.mesh);
  if (c.domain == "slit-square") return slit_square(c.initial_nt);
  return delaunay_unit_square(c.initial_nt, c.seed);
}

void log_level(std::ostream& log, const ErrorReport& e) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "level %2d  nt %7d  ndof %8d  e_p %.3e  e_rec %.3e  eta %.3e  eff %.3f\n", e.level,
                e.nt, e.ndof, e.e_p, e.e_rec, e.eta, e.efficiency);
  log << buf << std::flush;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config, std::ostream& log) {
  const RunConfig c = resolve(config);
  const ProblemSpec problem = make_problem(c);
  auto mesh = std::make_shared<const Mesh>(initial_mesh(c));
  ExperimentResult result;

  if (c.refine == RefineMode::kAdaptive) {
    result.reports = afem_loop(mesh, problem, c.r, c.theta, c.max_ndof, c.quad_degree,
                               [&](const ErrorReport& e) { log_level(log, e); }, c.levels)
                         .reports;
  } else {
    for (int level = 0; level < c.levels; ++level) {
      if (level > 0 && c.max_ndof > 0 && mixed_ndof(*mesh, c.r) > c.max_ndof) break;
      auto lr = [&] {
        try {
          return solve_and_measure(mesh, c.r, problem, c.quad_degree);
        } catch (const std::exception& ex) {
          throw std::runtime_error("level " + std::to_string(level) + ": " + ex.what());
        }
      }();
      lr.report.level = level;
      log_level(log, lr.report);
      result.reports.push_back(lr.report);
      if (level + 1 < c.levels)
        mesh = std::make_shared<const Mesh>(c.refine == RefineMode::kRegular ? refine_regular(*mesh)
                                                                              : refine_bisection_uniform(*mesh));
    }
  }
  result.orders = fit_orders(result.reports);
  return result;
}

void write_orders(std::ostream& out, const std::vector<OrderFit>& orders) {
  char buf[64];
  for (const auto& f : orders) {
    if (std::isnan(f.order))
      std::snprintf(buf, sizeof buf, "%-12s n/a\n", f.column.c_str());
    else
      std::snprintf(buf, sizeof buf, "%-12s %.3f\n", f.column.c_str(), f.order);
    out << buf;
  }
}

void write_convergence_svg(std::ostream& out, const std::vector<ErrorReport>& reports, const std::string& title) {
  struct Series {
    const char* label;
    double ErrorReport::*member;
    const char* color;
  };
  const Series series[] = {{"|p - p_h|", &ErrorReport::e_p, "#1f77b4"},
                           {"|Pi p - p_h|", &ErrorReport::e_close, "#2ca02c"},
                           {"|p - R p_h|", &ErrorReport::e_rec, "#d62728"},
                           {"eta", &ErrorReport::eta, "#9467bd"}};
  const double W = 640, H = 480, left = 80, right = 170, top = 40, bottom = 60;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& r : reports) {
    xmin = std::min(xmin, std::log10(r.ndof));
    xmax = std::max(xmax, std::log10(r.ndof));
    for (const auto& s : series) {
      const double v = r.*s.member;
      if (v > 0.0) {
        ymin = std::min(ymin, std::log10(v));
        ymax = std::max(ymax, std::log10(v));
      }
    }
  }
  if (xmin > xmax) xmin = 0, xmax = 1;
  if (ymin > ymax) ymin = -1, ymax = 0;
  xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1);
  ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1);
  auto X = [&](double lx) { return left + (W - left - right) * (lx - xmin) / (xmax - xmin); };
  auto Y = [&](double ly) { return H - bottom - (H - top - bottom) * (ly - ymin) / (ymax - ymin); };

  char buf[512];
  auto emit = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out << buf;
  };
  emit("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
       "font-size=\"12\">\n",
       W, H);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  emit("<text x=\"%.1f\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">%s</text>\n", (left + W - right) / 2,
       title.c_str());
  for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); ++d) {
    emit("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>\n", X(d), Y(ymin), X(d), Y(ymax));
    emit("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">1e%d</text>\n", X(d), Y(ymin) + 18, d);
  }
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
    emit("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>\n", X(xmin), Y(d), X(xmax), Y(d));
    emit("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">1e%d</text>\n", X(xmin) - 6, Y(d) + 4, d);
  }
  emit("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n", X(xmin),
       Y(ymax), X(xmax) - X(xmin), Y(ymin) - Y(ymax));
  emit("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">ndof</text>\n", (X(xmin) + X(xmax)) / 2, H - 15);

  int row = 0;
  for (const auto& s : series) {
    std::string pts;
    for (const auto& r : reports) {
      const double v = r.*s.member;
      if (!(v > 0.0)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(std::log10(r.ndof)), Y(std::log10(v)));
      pts += buf;
    }
    if (pts.empty()) continue;
    pts.pop_back();
    emit("<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"%s\"/>\n", s.color, pts.c_str());
    for (const auto& r : reports) {
      const double v = r.*s.member;
      if (v > 0.0) emit("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", X(std::log10(r.ndof)),
                        Y(std::log10(v)), s.color);
    }
    const double ly = top + 20 + 20 * row++;
    emit("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"1.5\"/>\n", W - right + 15,
         ly, W - right + 40, ly, s.color);
    emit("<text x=\"%.2f\" y=\"%.2f\">%s</text>\n", W - right + 46, ly + 4, s.label);
  }
  out << "</svg>\n";
}

void write_outputs(const RunConfig& config, const ExperimentResult& result) {
  const RunConfig c = resolve(config);
  namespace fs = std::filesystem;
  fs::create_directories(c.out);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(c.out) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(c.out) / name).string());
    return f;
  };
  {
    auto f = open("table.csv");
    write_csv(f, result.reports);
  }
  {
    auto f = open("orders.txt");
    write_orders(f, result.orders);
  }
  {
    auto f = open("convergence.svg");
    const std::string title = "Error curves for RT_" + std::to_string(c.r) + ", problem " +
                              std::to_string(c.problem) + " (" + to_string(c.refine) + ")";
    write_convergence_svg(f, result.reports, title);
  }
}

}  // namespace rtrecover
