#include "bergman/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "bergman/bounds.hpp"
#include "bergman/errors.hpp"
#include "bergman/kernel.hpp"
#include "bergman/symprod.hpp"
#include "bergman/version.hpp"

namespace bergman::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// parsing

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse integer " + what + ": '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse number " + what + ": '" + s + "'");
  }
}

// "3,6..9,12" -> {3,6,7,8,9,12}
std::vector<int> parse_k_list(const std::string& s) {
  std::vector<int> out;
  for (const std::string& tok : split(s, ',')) {
    if (tok.empty()) throw ValidationError("empty entry in k list '" + s + "'");
    const auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(tok, "k"));
    } else {
      const int lo = parse_int(tok.substr(0, dots), "k range start");
      const int hi = parse_int(tok.substr(dots + 2), "k range end");
      if (hi < lo) throw ValidationError("descending k range '" + tok + "'");
      for (int k = lo; k <= hi; ++k) out.push_back(k);
    }
  }
  return out;
}

// "x,y;x,y" or "grid:x0:x1:nx,y0:y1:ny"
void parse_points_spec(const std::string& s, RunConfig& config) {
  if (s.rfind("grid:", 0) == 0) {
    const auto parts = split(s.substr(5), ',');
    if (parts.size() != 2)
      throw ValidationError("grid spec needs 'grid:x0:x1:nx,y0:y1:ny'");
    const auto xs = split(parts[0], ':');
    const auto ys = split(parts[1], ':');
    if (xs.size() != 3 || ys.size() != 3)
      throw ValidationError("grid spec needs 'grid:x0:x1:nx,y0:y1:ny'");
    GridSpec g;
    g.x0 = parse_double(xs[0], "grid x0");
    g.x1 = parse_double(xs[1], "grid x1");
    g.nx = parse_int(xs[2], "grid nx");
    g.y0 = parse_double(ys[0], "grid y0");
    g.y1 = parse_double(ys[1], "grid y1");
    g.ny = parse_int(ys[2], "grid ny");
    config.grid = g;
    config.points.clear();
    return;
  }
  config.points.clear();
  config.grid.reset();
  for (const std::string& tok : split(s, ';')) {
    const auto xy = split(tok, ',');
    if (xy.size() != 2)
      throw ValidationError("point '" + tok + "' must be 'x,y'");
    config.points.push_back(
        {parse_double(xy[0], "point x"), parse_double(xy[1], "point y")});
  }
}

}  // namespace

RunConfig config_from_json(const json& j, RunConfig base) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  RunConfig c = std::move(base);
  if (j.contains("command")) c.command = j.at("command").get<std::string>();
  if (j.contains("group")) c.group = j.at("group").get<std::string>();
  if (j.contains("k")) c.k_values = j.at("k").get<std::vector<int>>();
  if (j.contains("points")) {
    c.points.clear();
    c.grid.reset();
    for (const auto& row : j.at("points")) {
      if (!row.is_array() || row.size() != 2)
        throw ValidationError("config: points entries must be [x, y]");
      c.points.push_back({row[0].get<double>(), row[1].get<double>()});
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    GridSpec gs;
    gs.x0 = g.at("x0").get<double>();
    gs.x1 = g.at("x1").get<double>();
    gs.nx = g.at("nx").get<int>();
    gs.y0 = g.at("y0").get<double>();
    gs.y1 = g.at("y1").get<double>();
    gs.ny = g.at("ny").get<int>();
    c.grid = gs;
    c.points.clear();
  }
  if (j.contains("word_length")) c.max_word_length = j.at("word_length").get<int>();
  if (j.contains("element_cap"))
    c.element_cap = j.at("element_cap").get<std::size_t>();
  if (j.contains("d")) c.d = j.at("d").get<int>();
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("prune")) c.prune = j.at("prune").get<bool>();
  if (j.contains("prune_cutoff"))
    c.prune_cutoff = j.at("prune_cutoff").get<double>();
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (t.contains("bound_check_rel"))
      c.tol.bound_check_rel = t.at("bound_check_rel").get<double>();
    if (t.contains("dedup_abs")) c.tol.dedup_abs = t.at("dedup_abs").get<double>();
    if (t.contains("tail_target"))
      c.tol.tail_target = t.at("tail_target").get<double>();
  }
  return c;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  if (args.empty())
    throw ValidationError(
        "usage: bergman <kernel|verify|symd|injectivity> [flags]");
  const std::string command = args[0];
  if (command != "kernel" && command != "verify" && command != "symd" &&
      command != "injectivity")
    throw ValidationError("unknown command '" + command + "'");

  auto value_of = [&](std::size_t& i, const std::string& flag) {
    if (i + 1 >= args.size())
      throw ValidationError("flag " + flag + " needs a value");
    return args[++i];
  };

  // First pass: config file, so that explicit flags win.
  RunConfig config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      const std::string path = value_of(i, "--config");
      std::ifstream in(path);
      if (!in) throw ValidationError("cannot open config file: " + path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ValidationError("config file " + path + ": " + e.what());
      }
      config = config_from_json(j, std::move(config));
    }
  }
  config.command = command;

  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      ++i;  // handled above
    } else if (a == "--group") {
      config.group = value_of(i, a);
    } else if (a == "--k") {
      config.k_values = parse_k_list(value_of(i, a));
    } else if (a == "--points") {
      parse_points_spec(value_of(i, a), config);
    } else if (a == "--word-length") {
      config.max_word_length = parse_int(value_of(i, a), "--word-length");
    } else if (a == "--out") {
      config.output = value_of(i, a);
    } else if (a == "--threads") {
      config.threads = parse_int(value_of(i, a), "--threads");
    } else if (a == "--element-cap") {
      config.element_cap =
          static_cast<std::size_t>(parse_double(value_of(i, a), "--element-cap"));
    } else if (a == "--d") {
      config.d = parse_int(value_of(i, a), "--d");
    } else if (a == "--cutoff") {
      config.prune_cutoff = parse_double(value_of(i, a), "--cutoff");
    } else if (a == "--tail-target") {
      config.tol.tail_target = parse_double(value_of(i, a), "--tail-target");
    } else if (a == "--bound-tol") {
      config.tol.bound_check_rel = parse_double(value_of(i, a), "--bound-tol");
    } else if (a == "--no-prune") {
      config.prune = false;
    } else {
      throw ValidationError("unknown flag '" + a + "'");
    }
  }
  return config;
}

std::vector<HPoint> resolve_points(const RunConfig& config) {
  std::vector<HPoint> pts;
  if (config.grid) {
    const GridSpec& g = *config.grid;
    if (g.nx < 1 || g.ny < 1)
      throw ValidationError("grid needs nx >= 1 and ny >= 1");
    for (int iy = 0; iy < g.ny; ++iy) {
      const double y =
          g.ny == 1 ? g.y0 : g.y0 + (g.y1 - g.y0) * iy / (g.ny - 1.0);
      for (int ix = 0; ix < g.nx; ++ix) {
        const double x =
            g.nx == 1 ? g.x0 : g.x0 + (g.x1 - g.x0) * ix / (g.nx - 1.0);
        pts.emplace_back(x, y);
      }
    }
  } else {
    for (const auto& p : config.points) pts.emplace_back(p[0], p[1]);
  }
  if (pts.empty())
    throw ValidationError("no evaluation points given (--points or config)");
  return pts;
}

namespace {

void validate_config(const RunConfig& config) {
  for (int k : config.k_values)
    if (k < 3)
      throw ValidationError("all k values must be >= 3 (got " +
                            std::to_string(k) + ")");
  if (config.k_values.empty()) throw ValidationError("k list is empty");
  if (config.max_word_length < 0 || config.max_word_length > kMaxWordLength)
    throw ValidationError("word length must lie in [0, " +
                          std::to_string(kMaxWordLength) + "]");
  if (config.element_cap == 0)
    throw ValidationError("element cap must be positive");
  if (config.output.empty()) throw ValidationError("output directory is empty");
  if (config.d && *config.d < 1) throw ValidationError("d must be >= 1");
  if (!(config.tol.tail_target > 0.0) || !(config.tol.dedup_abs > 0.0))
    throw ValidationError("tolerances must be positive");
  // A negative relative bound tolerance demands slack: lhs <= (1+tol) rhs.
  if (!(config.tol.bound_check_rel > -1.0) ||
      !std::isfinite(config.tol.bound_check_rel))
    throw ValidationError("bound tolerance must be a finite value > -1");
}

int resolve_threads(const RunConfig& config) {
  if (config.threads > 0) return config.threads;
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Displacement cutoff aimed at a relative series tail below `tail_target`,
// calibrated to the e^d/4 orbit growth of a genus-2 group: the shells beyond
// D contribute about (2^{2k}/4) e^{-(k-1)D}/(k-1) of the cosh-power sum.
// Heuristic; the reported per-evaluation tail_estimate is the honest check.
double displacement_cutoff_for(int k, double tail_target) {
  const double d = (2.0 * k * std::log(2.0) -
                    std::log(4.0 * (k - 1.0) * tail_target)) /
                   (k - 1.0);
  return std::max(d, 0.0) + 1.0;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// shared evaluation context

struct EvalContext {
  GroupSpec group;
  std::vector<HPoint> points;
  HPoint basepoint;
  double grid_radius = 0.0;
  std::optional<double> cutoff_max;  // enumeration cutoff; nullopt = unpruned
  ElementSet base_set;
  // Per k (parallel to config.k_values): filtered set, or nullopt meaning
  // "use base_set".
  std::vector<std::optional<ElementSet>> per_k;
  std::vector<double> per_k_cutoff;
  InjectivityEstimate inj;

  EvalContext(GroupSpec g, std::vector<HPoint> pts, HPoint base)
      : group(std::move(g)), points(std::move(pts)), basepoint(base) {}

  const ElementSet& set_for(std::size_t k_index) const {
    return per_k[k_index] ? *per_k[k_index] : base_set;
  }
};

HPoint centroid(const std::vector<HPoint>& pts) {
  double sx = 0.0, sy = 0.0;
  for (const HPoint& p : pts) {
    sx += p.x();
    sy += p.y();
  }
  return HPoint(sx / pts.size(), sy / pts.size());
}

EvalContext build_context(const RunConfig& config) {
  GroupSpec group = resolve_group(config.group);
  std::vector<HPoint> points = resolve_points(config);
  const HPoint base = centroid(points);
  EvalContext ctx(std::move(group), std::move(points), base);
  for (const HPoint& p : ctx.points)
    ctx.grid_radius = std::max(ctx.grid_radius, hyp_distance(ctx.basepoint, p));

  // r_X upper bound; a group property, so a moderate word budget suffices.
  const int inj_budget = std::max(4, std::min(config.max_word_length, 8));
  ctx.inj = injectivity_radius(ctx.group, ctx.points, inj_budget,
                               config.element_cap);

  ctx.per_k_cutoff.assign(config.k_values.size(), 0.0);
  if (config.prune) {
    double cutoff_max = 0.0;
    for (std::size_t i = 0; i < config.k_values.size(); ++i) {
      const double c =
          config.prune_cutoff
              ? *config.prune_cutoff
              : displacement_cutoff_for(config.k_values[i],
                                        config.tol.tail_target) +
                    2.0 * ctx.grid_radius;
      ctx.per_k_cutoff[i] = c;
      cutoff_max = std::max(cutoff_max, c);
    }
    ctx.cutoff_max = cutoff_max;
    ctx.base_set = enumerate_elements(
        ctx.group, config.max_word_length,
        PruneSpec{ctx.basepoint, cutoff_max}, config.element_cap,
        config.tol.dedup_abs);
    ctx.per_k.resize(config.k_values.size());
    for (std::size_t i = 0; i < config.k_values.size(); ++i) {
      if (ctx.per_k_cutoff[i] < cutoff_max - 1e-9)
        ctx.per_k[i] = ctx.base_set.filtered_by_displacement(ctx.per_k_cutoff[i]);
    }
  } else {
    ctx.base_set =
        enumerate_elements(ctx.group, config.max_word_length, std::nullopt,
                           config.element_cap, config.tol.dedup_abs);
    ctx.per_k.resize(config.k_values.size());
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// report assembly

ordered_json config_json(const RunConfig& config,
                         const std::vector<HPoint>& points) {
  ordered_json j;
  j["command"] = config.command;
  j["group"] = config.group;
  j["k"] = config.k_values;
  ordered_json pts = ordered_json::array();
  for (const HPoint& p : points) pts.push_back({p.x(), p.y()});
  j["points"] = pts;
  j["word_length"] = config.max_word_length;
  j["element_cap"] = config.element_cap;
  if (config.d) j["d"] = *config.d;
  j["output"] = config.output;
  j["prune"] = config.prune;
  if (config.prune_cutoff) j["prune_cutoff"] = *config.prune_cutoff;
  j["tolerances"] = {{"bound_check_rel", config.tol.bound_check_rel},
                     {"dedup_abs", config.tol.dedup_abs},
                     {"tail_target", config.tol.tail_target}};
  return j;
}

ordered_json group_json(const GroupSpec& g) {
  ordered_json j;
  j["label"] = g.label;
  j["genus"] = g.genus;
  ordered_json gens = ordered_json::array();
  for (const MobiusElement& m : g.generators)
    gens.push_back({m.a(), m.b(), m.c(), m.d()});
  j["generators"] = gens;
  return j;
}

ordered_json enumeration_json(const RunConfig& config, const EvalContext& ctx) {
  ordered_json j;
  j["basepoint"] = {ctx.basepoint.x(), ctx.basepoint.y()};
  j["grid_radius"] = ctx.grid_radius;
  j["pruned"] = config.prune;
  if (ctx.cutoff_max) {
    j["displacement_cutoff"] = *ctx.cutoff_max;
    j["prune_margin"] = ctx.base_set.prune_margin();
  }
  j["element_count"] = ctx.base_set.size();
  j["max_word_length_present"] = ctx.base_set.max_word_length();
  ordered_json per_k = ordered_json::array();
  for (std::size_t i = 0; i < config.k_values.size(); ++i) {
    ordered_json row;
    row["k"] = config.k_values[i];
    if (config.prune) row["displacement_cutoff"] = ctx.per_k_cutoff[i];
    row["element_count"] = ctx.set_for(i).size();
    per_k.push_back(row);
  }
  j["per_k"] = per_k;
  j["r_upper"] = ctx.inj.r_upper;
  j["r_upper_word"] = ctx.inj.argmin_word_text;
  j["r_upper_word_length_budget"] = ctx.inj.word_length_budget;
  j["r_upper_note"] =
      "upper bound for the injectivity radius from displacement minimization "
      "over the enumerated word ball";
  return j;
}

ordered_json bound_report_json(const BoundReport& r) {
  ordered_json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["passed"] = r.passed;
  return j;
}

ordered_json report_envelope(const RunConfig& config, const EvalContext& ctx) {
  ordered_json rep;
  rep["command"] = config.command;
  rep["version"] = kVersion;
  rep["config"] = config_json(config, ctx.points);
  rep["group"] = group_json(ctx.group);
  rep["enumeration"] = enumeration_json(config, ctx);
  return rep;
}

void write_text(const fs::path& path, const std::string& text,
                std::vector<std::string>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  files.push_back(path.string());
}

void write_outputs(const RunConfig& config, const ordered_json& report,
                   const std::string& csv, RunOutput& out) {
  const fs::path dir(config.output);
  fs::create_directories(dir);
  write_text(dir / (config.command + "_report.json"), report.dump(2) + "\n",
             out.files_written);
  write_text(dir / (config.command + ".csv"), csv, out.files_written);
}

}  // namespace

// ---------------------------------------------------------------------------
// commands

RunOutput run_kernel(const RunConfig& config) {
  validate_config(config);
  EvalContext ctx = build_context(config);
  const std::size_t np = ctx.points.size();
  const std::size_t nk = config.k_values.size();

  // Sets truncated two word-length shells down, for the convergence column.
  const int prev_len = std::max(0, config.max_word_length - 2);
  std::vector<ElementSet> prev_sets;
  prev_sets.reserve(nk);
  for (std::size_t i = 0; i < nk; ++i)
    prev_sets.push_back(ctx.set_for(i).truncated(prev_len));

  struct Row {
    KernelEvaluation ev;
    double prev_value = 0.0;
    double rel_change = 0.0;
    double asym_deviation = 0.0;
  };
  std::vector<Row> rows(np * nk);
  parallel_for(np * nk, resolve_threads(config), [&](std::size_t t) {
    const std::size_t pi = t / nk;
    const std::size_t ki = t % nk;
    const int k = config.k_values[ki];
    const HPoint& z = ctx.points[pi];
    Row& row = rows[t];
    row.ev = bergman_kernel_X(z, k, ctx.set_for(ki));
    const KernelEvaluation prev = bergman_kernel_X(z, k, prev_sets[ki]);
    row.prev_value = prev.value.real();
    const double denom = std::abs(row.ev.value.real());
    row.rel_change =
        denom > 0.0 ? std::abs(row.ev.value.real() - row.prev_value) / denom
                    : 0.0;
    row.asym_deviation = std::abs(2.0 * M_PI * row.ev.value.real() / k - 1.0);
  });

  ordered_json rep = report_envelope(config, ctx);
  ordered_json jrows = ordered_json::array();
  std::string csv =
      "x,y,k,bkx,bkx_imag,last_shell_magnitude,tail_estimate,element_count,"
      "word_length,bkx_prev_word_length,rel_change,asym_deviation\n";
  for (std::size_t pi = 0; pi < np; ++pi) {
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const Row& row = rows[pi * nk + ki];
      const HPoint& z = ctx.points[pi];
      ordered_json r;
      r["x"] = z.x();
      r["y"] = z.y();
      r["k"] = config.k_values[ki];
      r["bkx"] = row.ev.value.real();
      r["bkx_imag"] = row.ev.value.imag();
      r["last_shell_magnitude"] = row.ev.last_shell_magnitude;
      r["tail_estimate"] = row.ev.tail_estimate;
      r["element_count"] = row.ev.element_count;
      r["word_length"] = row.ev.truncation_word_length;
      r["bkx_prev_word_length"] = row.prev_value;
      r["rel_change"] = row.rel_change;
      r["asym_deviation"] = row.asym_deviation;
      jrows.push_back(r);
      csv += fmt_double(z.x()) + "," + fmt_double(z.y()) + "," +
             std::to_string(config.k_values[ki]) + "," +
             fmt_double(row.ev.value.real()) + "," +
             fmt_double(row.ev.value.imag()) + "," +
             fmt_double(row.ev.last_shell_magnitude) + "," +
             fmt_double(row.ev.tail_estimate) + "," +
             std::to_string(row.ev.element_count) + "," +
             std::to_string(row.ev.truncation_word_length) + "," +
             fmt_double(row.prev_value) + "," + fmt_double(row.rel_change) +
             "," + fmt_double(row.asym_deviation) + "\n";
    }
  }
  rep["rows"] = jrows;

  RunOutput out;
  out.report = std::move(rep);
  write_outputs(config, out.report, csv, out);
  return out;
}

RunOutput run_verify(const RunConfig& config) {
  validate_config(config);
  EvalContext ctx = build_context(config);
  const std::size_t np = ctx.points.size();
  const std::size_t nk = config.k_values.size();

  struct Row {
    KernelEvaluation ev;
    double ratio = 0.0;
    BoundReport thm1;
    ChainReport chain;
    double c_x_half = 0.0;
    double cor1_value = 0.0;
  };
  std::vector<Row> rows(np * nk);
  parallel_for(np * nk, resolve_threads(config), [&](std::size_t t) {
    const std::size_t pi = t / nk;
    const std::size_t ki = t % nk;
    const int k = config.k_values[ki];
    const HPoint& z = ctx.points[pi];
    const ElementSet& elems = ctx.set_for(ki);
    Row& row = rows[t];
    row.ev = bergman_kernel_X(z, k, elems);
    row.ratio = ratio_ber_hyp(z, k, elems);
    row.thm1 = check_theorem1(z, k, elems, ctx.inj.r_upper,
                              config.tol.bound_check_rel);
    row.chain = kernel_upper_chain(z, k, elems, ctx.inj.r_upper,
                                   config.tol.bound_check_rel);
    // C_X is decreasing in r_X and r_upper only bounds r_X from above, so
    // report the constant at half the estimate as a sensitivity value.
    row.c_x_half = constant_CX(k, ctx.inj.r_upper / 2.0);
    row.cor1_value = std::abs(row.ratio) / (static_cast<double>(k) * k);
  });

  std::size_t checks = 0, passed = 0;
  ordered_json jrows = ordered_json::array();
  std::string csv =
      "x,y,k,bkx,ratio_ber_hyp,thm1_lhs,thm1_rhs,thm1_slack,thm1_passed,"
      "chain1_lhs,chain1_rhs,chain1_passed,chain2_lhs,chain2_rhs,"
      "chain2_passed,c_x,c_x_at_half_r,cor1_value,cor1_bound,cor1_below\n";
  for (std::size_t pi = 0; pi < np; ++pi) {
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const Row& row = rows[pi * nk + ki];
      const HPoint& z = ctx.points[pi];
      const int k = config.k_values[ki];
      for (const BoundReport* r :
           {&row.thm1, &row.chain.kernel_vs_cosh_sum, &row.chain.cosh_sum_vs_cx}) {
        ++checks;
        if (r->passed) ++passed;
      }
      const bool cor1_below = row.cor1_value < corollary1_bound();
      ordered_json r;
      r["x"] = z.x();
      r["y"] = z.y();
      r["k"] = k;
      r["bkx"] = row.ev.value.real();
      r["bkx_imag"] = row.ev.value.imag();
      r["tail_estimate"] = row.ev.tail_estimate;
      r["element_count"] = row.ev.element_count;
      r["word_length"] = row.ev.truncation_word_length;
      r["ratio_ber_hyp"] = row.ratio;
      r["theorem1"] = bound_report_json(row.thm1);
      ordered_json chain;
      chain["kernel_value"] = row.chain.kernel_value;
      chain["cosh_sum"] = row.chain.cosh_sum;
      chain["c_x"] = row.chain.c_x;
      chain["link1"] = bound_report_json(row.chain.kernel_vs_cosh_sum);
      chain["link2"] = bound_report_json(row.chain.cosh_sum_vs_cx);
      r["chain"] = chain;
      r["c_x_at_half_r"] = row.c_x_half;
      r["r_x_provenance"] = "upper bound (enumerated)";
      r["cor1_value"] = row.cor1_value;
      r["cor1_bound"] = corollary1_bound();
      r["cor1_below"] = cor1_below;
      jrows.push_back(r);
      csv += fmt_double(z.x()) + "," + fmt_double(z.y()) + "," +
             std::to_string(k) + "," + fmt_double(row.ev.value.real()) + "," +
             fmt_double(row.ratio) + "," + fmt_double(row.thm1.lhs) + "," +
             fmt_double(row.thm1.rhs) + "," + fmt_double(row.thm1.slack) +
             "," + (row.thm1.passed ? "1" : "0") + "," +
             fmt_double(row.chain.kernel_vs_cosh_sum.lhs) + "," +
             fmt_double(row.chain.kernel_vs_cosh_sum.rhs) + "," +
             (row.chain.kernel_vs_cosh_sum.passed ? "1" : "0") + "," +
             fmt_double(row.chain.cosh_sum_vs_cx.lhs) + "," +
             fmt_double(row.chain.cosh_sum_vs_cx.rhs) + "," +
             (row.chain.cosh_sum_vs_cx.passed ? "1" : "0") + "," +
             fmt_double(row.chain.c_x) + "," + fmt_double(row.c_x_half) + "," +
             fmt_double(row.cor1_value) + "," +
             fmt_double(corollary1_bound()) + "," + (cor1_below ? "1" : "0") +
             "\n";
    }
  }

  ordered_json rep = report_envelope(config, ctx);
  rep["rows"] = jrows;
  rep["summary"] = {{"checks_total", checks},
                    {"checks_passed", passed},
                    {"all_passed", checks == passed}};

  RunOutput out;
  out.exit_code = (checks == passed) ? kExitOk : kExitBoundFailure;
  out.report = std::move(rep);
  write_outputs(config, out.report, csv, out);
  return out;
}

RunOutput run_symd(const RunConfig& config) {
  validate_config(config);
  if (!config.d)
    throw ValidationError("symd requires a symmetric-product degree (--d)");
  const int d = *config.d;

  EvalContext ctx = build_context(config);
  // Validate the dimension condition for every k up front so the error names
  // the offending k.
  for (int k : config.k_values) GrassmannDims(ctx.group.genus, k, d);

  if (ctx.points.size() % static_cast<std::size_t>(d) != 0)
    throw ValidationError(
        "symd: number of points (" + std::to_string(ctx.points.size()) +
        ") is not a multiple of d = " + std::to_string(d) +
        "; points are consumed as consecutive d-tuples");
  std::vector<SymPoint> sympoints;
  for (std::size_t i = 0; i < ctx.points.size(); i += d) {
    std::vector<HPoint> tuple(ctx.points.begin() + i,
                              ctx.points.begin() + i + d);
    sympoints.emplace_back(std::move(tuple));
  }

  const std::size_t np = sympoints.size();
  const std::size_t nk = config.k_values.size();
  struct Row {
    double hyp_density = 0.0;
    double fs_estimate = 0.0;
    double thm2 = 0.0;
    double cor2_value = 0.0;
  };
  std::vector<Row> rows(np * nk);
  parallel_for(np * nk, resolve_threads(config), [&](std::size_t t) {
    const std::size_t pi = t / nk;
    const std::size_t ki = t % nk;
    const int k = config.k_values[ki];
    const SymPoint& p = sympoints[pi];
    const ElementSet& elems = ctx.set_for(ki);
    Row& row = rows[t];
    row.hyp_density = symd_hyp_volume_density(p);
    row.fs_estimate = symd_fs_volume_estimate(p, k, elems, ctx.group.genus).value;
    row.thm2 =
        theorem2_rhs(p, k, elems, ctx.inj.r_upper, ctx.group.genus).value;
    row.cor2_value = std::abs(row.fs_estimate / row.hyp_density) /
                     std::pow(static_cast<double>(k), 2.0 * d);
  });

  ordered_json rep = report_envelope(config, ctx);
  rep["caveat"] = kSymdCaveat;
  ordered_json jrows = ordered_json::array();
  std::string csv =
      "point_index,k,hyp_density,fs_estimate,theorem2_rhs,cor2_value,"
      "cor2_bound,cor2_below\n";
  const double bound = corollary2_bound(d);
  for (std::size_t pi = 0; pi < np; ++pi) {
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const Row& row = rows[pi * nk + ki];
      const int k = config.k_values[ki];
      ordered_json r;
      ordered_json pts = ordered_json::array();
      for (const HPoint& z : sympoints[pi].points())
        pts.push_back({z.x(), z.y()});
      r["points"] = pts;
      r["k"] = k;
      r["hyp_density"] = row.hyp_density;
      r["fs_estimate"] = row.fs_estimate;
      r["theorem2_rhs"] = row.thm2;
      r["theorem2_certified"] = false;
      r["cor2_value"] = row.cor2_value;
      r["cor2_bound"] = bound;
      r["cor2_below"] = row.cor2_value < bound;
      r["caveat"] = kSymdCaveat;
      jrows.push_back(r);
      csv += std::to_string(pi) + "," + std::to_string(k) + "," +
             fmt_double(row.hyp_density) + "," + fmt_double(row.fs_estimate) +
             "," + fmt_double(row.thm2) + "," + fmt_double(row.cor2_value) +
             "," + fmt_double(bound) + "," +
             (row.cor2_value < bound ? "1" : "0") + "\n";
    }
  }
  rep["rows"] = jrows;

  RunOutput out;
  out.report = std::move(rep);
  write_outputs(config, out.report, csv, out);
  return out;
}

RunOutput run_injectivity(const RunConfig& config) {
  validate_config(config);
  if (config.max_word_length < 1)
    throw ValidationError("injectivity requires word length >= 1");
  GroupSpec group = resolve_group(config.group);
  std::vector<HPoint> points = resolve_points(config);

  const auto table = injectivity_convergence(group, points,
                                             config.max_word_length,
                                             config.element_cap);

  ordered_json rep;
  rep["command"] = config.command;
  rep["version"] = kVersion;
  rep["config"] = config_json(config, points);
  rep["group"] = group_json(group);
  ordered_json jrows = ordered_json::array();
  std::string csv = "word_length,r_upper,argmin_word\n";
  for (const InjectivityEstimate& est : table) {
    ordered_json r;
    r["word_length"] = est.word_length_budget;
    r["r_upper"] = est.r_upper;
    r["argmin_word"] = est.argmin_word_text;
    jrows.push_back(r);
    csv += std::to_string(est.word_length_budget) + "," +
           fmt_double(est.r_upper) + "," + est.argmin_word_text + "\n";
  }
  rep["rows"] = jrows;
  const InjectivityEstimate& last = table.back();
  rep["estimate"] = {{"r_upper", last.r_upper},
                     {"argmin_word", last.argmin_word_text},
                     {"word_length_budget", last.word_length_budget},
                     {"note",
                      "upper bound: the injectivity radius is an infimum over "
                      "the whole group and plane"}};

  RunOutput out;
  out.report = std::move(rep);
  write_outputs(config, out.report, csv, out);
  return out;
}

RunOutput run(const RunConfig& config) {
  if (config.command == "kernel") return run_kernel(config);
  if (config.command == "verify") return run_verify(config);
  if (config.command == "symd") return run_symd(config);
  if (config.command == "injectivity") return run_injectivity(config);
  throw ValidationError("unknown command '" + config.command + "'");
}

namespace {

const char* kUsage =
    "usage: bergman <kernel|verify|symd|injectivity> [flags]\n"
    "\n"
    "flags:\n"
    "  --config PATH       JSON run configuration (flags override it)\n"
    "  --group NAME|PATH   built-in group label ('bolza') or group JSON file\n"
    "  --k LIST            weights, e.g. '3,6,12' or '3..12'\n"
    "  --points SPEC       'x,y;x,y;...' or 'grid:x0:x1:nx,y0:y1:ny'\n"
    "  --word-length N     word-length truncation of the group ball\n"
    "  --element-cap N     enumeration budget (default 5e6)\n"
    "  --d N               symmetric-product degree (symd only)\n"
    "  --out DIR           output directory (default 'out')\n"
    "  --threads N         worker threads (default: BERGMAN_THREADS or cores)\n"
    "  --cutoff X          explicit displacement cutoff for pruning\n"
    "  --tail-target X     relative series tail aimed for by pruning\n"
    "  --bound-tol X       relative pass tolerance for bound checks\n"
    "  --no-prune          enumerate the full word ball (small budgets only)\n";

}  // namespace

int main_entry(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  if (!args.empty() && (args[0] == "--help" || args[0] == "-h")) {
    std::cout << kUsage;
    return kExitOk;
  }
  try {
    const RunConfig config = parse_args(args);
    const RunOutput out = run(config);
    for (const std::string& f : out.files_written)
      std::cout << "wrote " << f << "\n";
    if (out.report.contains("summary")) {
      const auto& s = out.report["summary"];
      std::cout << config.command << ": " << s["checks_passed"] << "/"
                << s["checks_total"] << " checks passed\n";
    }
    if (out.report.contains("estimate")) {
      std::cout << config.command
                << ": r_upper = " << out.report["estimate"]["r_upper"] << "\n";
    }
    return out.exit_code;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const BudgetExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace bergman::cli
