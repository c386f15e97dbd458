#pragma once

// Command-line front end: flag parsing, dispatch to the library, CSV/JSON
// emission. Kept apart from main() so the test suite can drive it in-process.

#include "lipkin/lipkin.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <unistd.h>
#include <variant>
#include <vector>

#ifndef LIPKIN_VERSION
#define LIPKIN_VERSION "dev"
#endif

namespace lipkin::cli {

using json = nlohmann::json;

enum class Command { spectrum, gaps, scaling, eps, fit, localization };
enum class Format { csv, json };

class UsageError : public std::runtime_error {
public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  Command command = Command::spectrum;
  std::string command_name;
  Format format = Format::csv;
  std::string output; // empty: standard output
  bool timing = false;

  int n = 0;
  std::optional<double> lambda;
  std::string sector = "merged";
  bool lower_half = false;
  bool derivative = false;

  std::string law = "eq2";
  int k = 1;
  std::vector<int> n_list;
  std::vector<int> k_list;

  double re_min = 0.0, re_max = 3.0, im_min = 0.0, im_max = 3.0;
  std::optional<double> im_tol;
  std::optional<double> grid_step;
  unsigned threads = 0;

  std::vector<double> window{0.02, 0.15};
  std::vector<double> compare_window{0.02, 0.1};
  int terms = 3;
  std::string side = "both";
};

// ---- tables ---------------------------------------------------------------

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string csv_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, c);
}

inline json json_cell(const Cell& c) {
  struct V {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(long long v) const { return v; }
    json operator()(double v) const { return v; }
    json operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, c);
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += '\n';
  }
  return out;
}

inline json to_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[t.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(o));
  }
  return rows;
}

struct Result {
  Table table;
  json summary = json::object();
};

// ---- validation -------------------------------------------------------------

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

inline Selector selector_of(const std::string& s) {
  try {
    return parse_selector(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline FitWindow window_of(const std::vector<double>& w, const char* flag) {
  require(w.size() == 2, std::string(flag) + " takes two values: near,far");
  require(w[0] >= 0 && w[1] > w[0], std::string(flag) + " needs 0 <= near < far");
  return {w[0], w[1]};
}

inline void validate(const RunConfig& c) {
  auto need_n = [&] { require(c.n >= 1, "--n must be a positive integer"); };
  auto need_lambda = [&] { require(c.lambda.has_value(), "--lambda is required"); };
  switch (c.command) {
  case Command::spectrum:
  case Command::gaps:
  case Command::localization:
    need_n();
    need_lambda();
    selector_of(c.sector);
    break;
  case Command::scaling: {
    ScalingLaw law;
    try {
      law = parse_scaling_law(c.law);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (law == ScalingLaw::gap_vs_k) {
      need_n();
      require(c.k_list.size() >= 2, "--law eq2-k needs --k-list with at least two entries");
    } else {
      require(c.n_list.size() >= 2, "--n-list needs at least two entries");
    }
    if (law == ScalingLaw::gap_ratio) {
      need_lambda();
      require(*c.lambda > 1.0, "--law eq3 needs --lambda > 1");
    }
    if (law == ScalingLaw::gap_vs_n) require(c.k >= 1, "--k must be positive");
    break;
  }
  case Command::eps:
    need_n();
    require(c.re_max > c.re_min, "--re-max must exceed --re-min");
    require(c.im_max > c.im_min, "--im-max must exceed --im-min");
    require(c.im_min >= 0.0, "--im-min must be nonnegative (upper half-plane)");
    require(!c.im_tol || *c.im_tol > 0.0, "--im-tol must be positive");
    require(!c.grid_step || *c.grid_step > 0.0, "--grid-step must be positive");
    selector_of(c.sector);
    break;
  case Command::fit:
    need_n();
    need_lambda();
    require(*c.lambda > 1.0, "fit needs --lambda > 1 (no crossing of the critical line otherwise)");
    require(c.terms >= 1 && c.terms <= 3, "--terms must be 1, 2 or 3");
    require(c.side == "left" || c.side == "right" || c.side == "both", "--side must be left, right or both");
    require(c.sector == "even" || c.sector == "odd", "fit needs --sector even or odd");
    window_of(c.window, "--window");
    window_of(c.compare_window, "--compare-window");
    break;
  }
}

// ---- commands ---------------------------------------------------------------

inline Result run_spectrum(const RunConfig& c) {
  const auto s = full_spectrum(c.n, *c.lambda);
  const auto ss = scaled_spectrum(s, selector_of(c.sector), c.lower_half);
  Result r;
  if (c.derivative) {
    r.table.columns = {"x_mid", "deps_dx"};
    if (ss.points.size() >= 2)
      for (const auto& d : spectral_derivative(ss)) r.table.rows.push_back({d.x_mid, d.slope});
  } else {
    r.table.columns = {"k", "x", "E", "eps", "sector"};
    for (const auto& p : ss.points)
      r.table.rows.push_back({static_cast<long long>(p.k), p.x, p.energy, p.eps, std::string(to_string(p.sector))});
  }
  if (*c.lambda >= 1.0) {
    try {
      r.summary["x_c"] = critical_x(s);
    } catch (const std::domain_error&) {
      r.summary["x_c"] = nullptr;
    }
  }
  return r;
}

inline Result run_gaps(const RunConfig& c) {
  const auto s = full_spectrum(c.n, *c.lambda);
  const auto sel = selector_of(c.sector);
  Result r;
  r.table.columns = {"k", "gap"};
  const auto g = gaps(s, sel);
  for (std::size_t i = 0; i < g.size(); ++i) r.table.rows.push_back({static_cast<long long>(i + 1), g[i]});
  const auto m = min_gap(s, sel);
  r.summary["min_gap"] = {{"k", m.k}, {"gap", m.gap}};
  return r;
}

inline Result run_scaling(const RunConfig& c, std::ostream& err) {
  const auto law = parse_scaling_law(c.law);
  ScalingReport rep;
  if (law == ScalingLaw::gap_vs_n) {
    err << "scaling: " << c.n_list.size() << " sizes at lambda = " << c.lambda.value_or(1.0) << "\n";
    rep = scaling_exponent_eq2(c.k, c.n_list, c.lambda.value_or(1.0));
  } else if (law == ScalingLaw::gap_vs_k) {
    rep = scaling_exponent_eq2_in_k(c.n, c.k_list, c.lambda.value_or(1.0));
  } else {
    err << "scaling: " << c.n_list.size() << " sizes at lambda = " << *c.lambda << "\n";
    rep = gap_ratio_eq3(*c.lambda, c.n_list);
  }
  Result r;
  r.table.columns = {"n", "gap", "value"};
  for (const auto& s : rep.samples) r.table.rows.push_back({static_cast<long long>(s.n), s.gap, s.value});
  r.summary["law"] = std::string(to_string(rep.law));
  r.summary["lambda"] = rep.lambda;
  if (law == ScalingLaw::gap_vs_n) r.summary["k"] = rep.k;
  if (law == ScalingLaw::gap_vs_k) r.summary["n"] = rep.k;
  r.summary["slope"] = rep.slope ? json(*rep.slope) : json(nullptr);
  r.summary["intercept"] = rep.intercept ? json(*rep.intercept) : json(nullptr);
  return r;
}

inline Result run_eps(const RunConfig& c, std::ostream& err) {
  const Region region{c.re_min, c.re_max, c.im_min, c.im_max};
  std::optional<ScanGrid> grid;
  if (c.grid_step)
    grid = ScanGrid{std::max(1, static_cast<int>(std::ceil((c.re_max - c.re_min) / *c.grid_step))),
                    std::max(1, static_cast<int>(std::ceil((c.im_max - c.im_min) / *c.grid_step)))};
  ScanOptions opt;
  opt.threads = c.threads;
  std::vector<Parity> sectors;
  const auto sel = selector_of(c.sector);
  if (sel != Selector::odd) sectors.push_back(Parity::even);
  if (sel != Selector::even) sectors.push_back(Parity::odd);

  std::vector<ExceptionalPoint> all;
  for (Parity p : sectors) {
    const auto g = grid.value_or(default_grid(c.n, region));
    err << "eps: scanning " << to_string(p) << " sector, " << g.n_re << "x" << g.n_im << " cells\n";
    for (auto& ep : ep_scan(c.n, p, region, grid, opt)) {
      try {
        ep.pair = ep_pair_id(ep);
      } catch (const ConvergenceError&) {
        // left unlabelled
      }
      all.push_back(std::move(ep));
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const ExceptionalPoint& a, const ExceptionalPoint& b) {
    if (a.lambda_star.real() != b.lambda_star.real()) return a.lambda_star.real() < b.lambda_star.real();
    return a.lambda_star.imag() < b.lambda_star.imag();
  });

  Result r;
  r.table.columns = {"re_lambda", "im_lambda", "re_E", "im_E", "k", "k_next", "sector", "residual"};
  int near = 0;
  for (const auto& ep : all) {
    Cell k, kn;
    if (ep.pair) {
      k = static_cast<long long>(ep.pair->k);
      kn = static_cast<long long>(ep.pair->k_next);
    }
    r.table.rows.push_back({ep.lambda_star.real(), ep.lambda_star.imag(), ep.energy_star.real(),
                            ep.energy_star.imag(), k, kn, std::string(to_string(ep.sector)), ep.residual});
    if (c.im_tol && ep.lambda_star.real() > 1.0 && ep.lambda_star.real() < c.re_max &&
        ep.lambda_star.imag() < *c.im_tol)
      ++near;
  }
  r.summary["count"] = all.size();
  if (c.im_tol) r.summary["near_real_count"] = near;
  return r;
}

inline Result run_fit(const RunConfig& c, std::ostream& err) {
  err << "fit: diagonalising N = " << c.n << "\n";
  const auto s = full_spectrum(c.n, *c.lambda);
  const double x_c = critical_x(s);
  AcidTestOptions opt;
  opt.data = selector_of(c.sector);
  opt.n_terms = c.terms;
  opt.fit_window = window_of(c.window, "--window");
  opt.compare_window = window_of(c.compare_window, "--compare-window");

  std::vector<Side> sides;
  if (c.side != "right") sides.push_back(Side::left);
  if (c.side != "left") sides.push_back(Side::right);

  Result r;
  r.table.columns = {"side", "x_c", "a1", "a2", "a3", "rms_residual", "x_mid", "deps_dx_fd", "deps_dx_fit", "rel_dev"};
  r.summary["x_c"] = x_c;
  json fits = json::array();
  for (Side side : sides) {
    const auto t = acid_test(s, x_c, side, opt);
    auto coef = [&](std::size_t i) -> Cell {
      if (i < t.fit.coefficients.size()) return t.fit.coefficients[i];
      return {};
    };
    for (const auto& row : t.rows)
      r.table.rows.push_back({std::string(to_string(side)), x_c, coef(0), coef(1), coef(2), t.fit.rms_residual,
                              row.x_mid, row.fd_slope, row.fit_slope, row.rel_dev});
    fits.push_back({{"side", std::string(to_string(side))},
                    {"coefficients", t.fit.coefficients},
                    {"rms_residual", t.fit.rms_residual},
                    {"window", {t.fit.window_min, t.fit.window_max}},
                    {"n_points", t.fit.n_points},
                    {"max_rel_dev", t.max_rel_dev}});
  }
  r.summary["fits"] = std::move(fits);
  return r;
}

inline Result run_localization(const RunConfig& c) {
  const auto sel = selector_of(c.sector);
  std::vector<Parity> sectors;
  if (sel != Selector::odd) sectors.push_back(Parity::even);
  if (sel != Selector::even) sectors.push_back(Parity::odd);
  Result r;
  r.table.columns = {"k", "x", "E", "eps", "ipr", "dominant_m", "dominant_weight", "sector"};
  for (Parity p : sectors)
    for (const auto& row : localization(c.n, *c.lambda, p))
      r.table.rows.push_back({static_cast<long long>(row.k), row.x, row.energy, row.eps, row.ipr, row.dominant_m,
                              row.dominant_weight, std::string(to_string(p))});
  return r;
}

inline Result dispatch(const RunConfig& c, std::ostream& err) {
  switch (c.command) {
  case Command::spectrum: return run_spectrum(c);
  case Command::gaps: return run_gaps(c);
  case Command::scaling: return run_scaling(c, err);
  case Command::eps: return run_eps(c, err);
  case Command::fit: return run_fit(c, err);
  case Command::localization: return run_localization(c);
  }
  throw UsageError("unknown command");
}

// ---- output -----------------------------------------------------------------

inline json config_json(const RunConfig& c) {
  json j{{"command", c.command_name}};
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  switch (c.command) {
  case Command::spectrum:
    j.update({{"n", c.n}, {"lambda", *c.lambda}, {"sector", c.sector}, {"lower_half", c.lower_half},
              {"derivative", c.derivative}});
    break;
  case Command::gaps:
  case Command::localization:
    j.update({{"n", c.n}, {"lambda", *c.lambda}, {"sector", c.sector}});
    break;
  case Command::scaling:
    j.update({{"law", c.law}, {"lambda", opt(c.lambda)}, {"k", c.k}, {"n_list", c.n_list}, {"n", c.n},
              {"k_list", c.k_list}});
    break;
  case Command::eps:
    j.update({{"n", c.n}, {"sector", c.sector}, {"re_min", c.re_min}, {"re_max", c.re_max}, {"im_min", c.im_min},
              {"im_max", c.im_max}, {"im_tol", opt(c.im_tol)}, {"grid_step", opt(c.grid_step)}});
    break;
  case Command::fit:
    j.update({{"n", c.n}, {"lambda", *c.lambda}, {"sector", c.sector}, {"side", c.side}, {"terms", c.terms},
              {"window", c.window}, {"compare_window", c.compare_window}});
    break;
  }
  j["format"] = c.format == Format::csv ? "csv" : "json";
  return j;
}

inline std::string render(const RunConfig& c, const Result& r, std::optional<double> elapsed) {
  if (c.format == Format::csv) return to_csv(r.table);
  json results = r.summary;
  results["rows"] = to_json(r.table);
  json doc{{"config", config_json(c)},
           {"results", std::move(results)},
           {"meta", {{"tool_version", LIPKIN_VERSION}, {"elapsed_seconds", elapsed ? json(*elapsed) : json(nullptr)}}}};
  return doc.dump(2) + "\n";
}

/// Writes via a sibling temporary and rename, so a failed run leaves no file.
inline void write_atomic(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at " + path);
  }
}

// ---- parsing ----------------------------------------------------------------

inline void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--format", c.format, "csv or json")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::csv}, {"json", Format::json}}));
  sub->add_option("--output", c.output, "output file (default: standard output)");
  sub->add_flag("--timing", c.timing, "record elapsed_seconds in JSON meta (breaks byte-identical output)");
}

inline int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::optional<std::string> sector;
  CLI::App app{"Lipkin model spectra, scaling laws, exceptional points and singularity fits", "lipkin"};
  app.set_version_flag("--version", std::string(LIPKIN_VERSION));
  app.require_subcommand(1, 1);

  auto* spectrum = app.add_subcommand("spectrum", "scaled spectrum (x, eps) or its derivative");
  spectrum->add_option("--n", c.n, "particle number N")->required();
  spectrum->add_option("--lambda", c.lambda, "coupling")->required();
  spectrum->add_option("--sector", sector, "even, odd or merged");
  spectrum->add_flag("--lower-half", c.lower_half, "keep x <= 1 only");
  spectrum->add_flag("--derivative", c.derivative, "emit finite-difference d eps/dx instead");
  add_common(spectrum, c);

  auto* gaps_cmd = app.add_subcommand("gaps", "level spacings E_{k+1} - E_k");
  gaps_cmd->add_option("--n", c.n, "particle number N")->required();
  gaps_cmd->add_option("--lambda", c.lambda, "coupling")->required();
  gaps_cmd->add_option("--sector", sector, "even, odd or merged (default even)");
  add_common(gaps_cmd, c);

  auto* scaling = app.add_subcommand("scaling", "finite-size scaling of gaps");
  scaling->add_option("--law", c.law, "eq2 (gap vs N), eq2-k (gap vs k) or eq3 (log ratio)");
  scaling->add_option("--k", c.k, "fixed level index for eq2");
  scaling->add_option("--n-list", c.n_list, "increasing particle numbers")->delimiter(',');
  scaling->add_option("--n", c.n, "particle number for eq2-k");
  scaling->add_option("--k-list", c.k_list, "increasing level indices for eq2-k")->delimiter(',');
  scaling->add_option("--lambda", c.lambda, "coupling (default 1 for eq2)");
  add_common(scaling, c);

  auto* eps = app.add_subcommand("eps", "exceptional points in a rectangle of the complex lambda-plane");
  eps->add_option("--n", c.n, "particle number N")->required();
  eps->add_option("--sector", sector, "even, odd or merged (both)");
  eps->add_option("--re-min", c.re_min);
  eps->add_option("--re-max", c.re_max);
  eps->add_option("--im-min", c.im_min);
  eps->add_option("--im-max", c.im_max);
  eps->add_option("--im-tol", c.im_tol, "also count points with 1 < Re < re-max and Im < im-tol");
  eps->add_option("--grid-step", c.grid_step, "seed grid spacing (default min(0.05, 4/N))");
  eps->add_option("--threads", c.threads, "worker threads (0: all cores)");
  add_common(eps, c);

  auto* fit = app.add_subcommand("fit", "logarithmic singularity fit and derivative check");
  fit->add_option("--n", c.n, "particle number N")->required();
  fit->add_option("--lambda", c.lambda, "coupling > 1")->required();
  fit->add_option("--sector", sector, "data sector, even or odd (default even)");
  fit->add_option("--side", c.side, "left, right or both");
  fit->add_option("--terms", c.terms, "number of log-power terms, 1..3");
  fit->add_option("--window", c.window, "near,far bounds on |x - x_c| for the fit")->delimiter(',')->expected(2);
  fit->add_option("--compare-window", c.compare_window, "near,far bounds for the derivative check")
      ->delimiter(',')
      ->expected(2);
  add_common(fit, c);

  auto* loc = app.add_subcommand("localization", "inverse participation ratio of every eigenvector");
  loc->add_option("--n", c.n, "particle number N")->required();
  loc->add_option("--lambda", c.lambda, "coupling")->required();
  loc->add_option("--sector", sector, "even, odd or merged (both)");
  add_common(loc, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::pair<CLI::App*, Command> table[] = {{spectrum, Command::spectrum}, {gaps_cmd, Command::gaps},
                                                 {scaling, Command::scaling},   {eps, Command::eps},
                                                 {fit, Command::fit},           {loc, Command::localization}};
  for (const auto& [sub, cmd] : table)
    if (sub->parsed()) {
      c.command = cmd;
      c.command_name = sub->get_name();
    }
  const bool even_default = c.command == Command::gaps || c.command == Command::fit;
  c.sector = sector.value_or(even_default ? "even" : "merged");

  try {
    validate(c);
  } catch (const UsageError& e) {
    err << "lipkin: " << e.what() << "\n";
    return 2;
  }

  std::string text;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const Result r = dispatch(c, err);
    std::optional<double> elapsed;
    if (c.timing) elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    text = render(c, r, elapsed);
  } catch (const UsageError& e) {
    err << "lipkin: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "lipkin: numerical failure: " << e.what() << "\n";
    return 3;
  }

  if (c.output.empty()) {
    out << text << std::flush;
    return 0;
  }
  try {
    write_atomic(c.output, text);
  } catch (const std::exception& e) {
    err << "lipkin: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

} // namespace lipkin::cli
