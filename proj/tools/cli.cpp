#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "rqfi/error.hpp"
#include "rqfi/fock_oracle.hpp"
#include "rqfi/measurement.hpp"
#include "rqfi/parallel.hpp"
#include "rqfi/qfi.hpp"

namespace rqfi::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

// Configuration problem with the offending flag named in the message.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

using Cell = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

void write_table(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "json") {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) obj[t.header[i]] = row[i];
      arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "");
      if (row[i].is_string())
        out << row[i].get<std::string>();
      else if (row[i].is_number_integer())
        out << row[i].get<long long>();
      else
        out << num(row[i].get<double>());
    }
    out << '\n';
  }
}

struct Common {
  std::string psf = "gaussian";
  double xr = 0.0;
  double eta = 0.4;
  std::string s = "0.02:6:300";
  std::string output = "-";
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c, bool with_grid = true) {
  app->add_option("--psf", c.psf, "'gaussian' or a CSV file of x,amplitude samples")->capture_default_str();
  app->add_option("--xr", c.xr, "Rayleigh length (default 1 for gaussian, RMS width for files)");
  app->add_option("--eta", c.eta, "attenuation factor, 0 < eta <= 1/2")->capture_default_str();
  if (with_grid) app->add_option("--s", c.s, "separations: min:max:points[@geometric], a,b,c or a value")->capture_default_str();
  app->add_option("-o,--output", c.output, "output file, '-' for stdout")->capture_default_str();
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !(eta <= 0.5)) {
    throw ConfigError("--eta: eta = " + num(eta) +
                      " must satisfy 0 < eta <= 1/2; the beam-splitter model is well-defined only for eta <= 1/2");
  }
}

ImagingSystem make_system(const Common& c) {
  check_eta(c.eta);
  if (c.xr < 0.0) throw ConfigError("--xr: Rayleigh length must be positive");
  if (c.psf == "gaussian") return ImagingSystem(c.eta, PsfModel::gaussian(c.xr > 0.0 ? c.xr : 1.0));
  return ImagingSystem(c.eta, load_psf_csv(c.psf, c.xr));
}

std::vector<double> grid_of(const std::string& spec) {
  try {
    return parse_grid(spec);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("--s: ") + e.what());
  }
}

// Writes through a temporary string so a failed run leaves no partial file.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorCode::IoFailure, "write failed for '" + path + "'");
}

struct SourceOpts {
  std::string family;
  double N = 1.0;
  int n_plus = 0;
  int n_minus = 0;
  double xi = 0.0;
  double w = 0.0;
};

void add_source(CLI::App* app, SourceOpts& o, bool required, const std::string& def = "") {
  auto* opt = app->add_option("--source", o.family, "thermal, fock, tmsv or corr-thermal")
                  ->check(CLI::IsMember({"thermal", "fock", "tmsv", "corr-thermal"}));
  if (required) opt->required();
  if (!def.empty()) {
    o.family = def;
    opt->capture_default_str();
  }
  app->add_option("--N", o.N, "mean photons per source (thermal, corr-thermal)")->capture_default_str();
  app->add_option("--Nplus", o.n_plus, "photons in the symmetric source mode (fock)")->capture_default_str();
  app->add_option("--Nminus", o.n_minus, "photons in the antisymmetric source mode (fock)")->capture_default_str();
  app->add_option("--xi", o.xi, "squeezing parameter (tmsv)")->capture_default_str();
  app->add_option("--w", o.w, "cross-correlation, |w| <= 1 (corr-thermal)")->capture_default_str();
}

SourceSpec make_source(const SourceOpts& o) {
  SourceSpec src;
  if (o.family == "thermal") src = Thermal{o.N};
  else if (o.family == "fock") src = FockPM{o.n_plus, o.n_minus};
  else if (o.family == "tmsv") src = Tmsv{o.xi};
  else src = CorrThermal{o.N, o.w};
  try {
    validate(src);
  } catch (const Error& e) {
    const std::string field = o.family == "fock" ? "--Nplus/--Nminus"
                              : o.family == "tmsv" ? "--xi"
                              : (o.family == "corr-thermal" && std::abs(o.w) > 1.0) ? "--w"
                                                                                      : "--N";
    throw ConfigError(field + ": " + e.what());
  }
  return src;
}

int cmd_functionals(const Common& c, std::ostream& out) {
  const auto sys = make_system(c);
  const auto s = grid_of(c.s);
  Table t{{"s", "delta", "gamma", "beta", "dk2", "eps_plus_sq", "eps_minus_sq", "f_plus", "f_minus"}, {}};
  t.rows.resize(s.size());
  parallel_for(s.size(), [&](std::size_t i) {
    const auto fn = functionals(sys.psf(), s[i]);
    const auto [fp, fm] = f_functions(sys.eta(), fn, sys.rayleigh_length());
    t.rows[i] = {s[i], fn.delta, fn.gamma, fn.beta, fn.dk2, fn.eps_plus_sq, fn.eps_minus_sq, fp, fm};
  });
  std::ostringstream text;
  write_table(t, c.format, text);
  emit(c.output, out, text.str());
  return kOk;
}

int cmd_bound(const Common& c, double N, std::ostream& out) {
  const auto sys = make_system(c);
  if (!(N >= 0.0)) throw ConfigError("--N: photon number must be >= 0");
  const auto s = grid_of(c.s);
  Table t{{"s", "eta", "N", "f_plus", "f_minus", "bound", "bound_normalized"}, {}};
  t.rows.resize(s.size());
  parallel_for(s.size(), [&](std::size_t i) {
    const auto [fp, fm] = f_functions(sys, s[i]);
    const double b = qfi_upper_bound(sys, s[i], N);
    t.rows[i] = {s[i], sys.eta(), N, fp, fm, b, std::max(fp, fm)};
  });
  std::ostringstream text;
  write_table(t, c.format, text);
  emit(c.output, out, text.str());
  return kOk;
}

int cmd_qfi(const Common& c, const SourceOpts& so, const std::string& variant, std::ostream& out) {
  const auto sys = make_system(c);
  const auto src = make_source(so);
  TmsvVariant v;
  try {
    v = parse_tmsv_variant(variant);
  } catch (const Error& e) {
    throw ConfigError(std::string("--variant: ") + e.what());
  }
  const auto s = grid_of(c.s);
  std::vector<QfiReport> reports(s.size());
  parallel_for(s.size(), [&](std::size_t i) { reports[i] = qfi_report(src, sys, s[i], v); });
  Table t{{"s", "eta", "family", "params", "qfi", "qfi_normalized", "crb", "bound"}, {}};
  for (const auto& r : reports)
    t.rows.push_back({r.s, r.eta, family_name(r.source), params_string(r.source), r.qfi, r.qfi_normalized,
                      std::isinf(r.crb) ? Cell("inf") : Cell(r.crb), r.bound});
  std::ostringstream text;
  write_table(t, c.format, text);
  emit(c.output, out, text.str());
  return kOk;
}

int cmd_oracle(const Common& c, const SourceOpts& so, const OracleOptions& opts, std::ostream& out) {
  const auto sys = make_system(c);
  const auto src = make_source(so);
  const auto s = grid_of(c.s);
  if (sys.psf().kind() != PsfKind::GaussianClosedForm)
    throw ConfigError("--psf: the Fock oracle supports only the gaussian PSF");
  std::string text;
  if (std::holds_alternative<Tmsv>(src)) {
    text = adjudicate_tmsv(std::get<Tmsv>(src).xi, sys, s, opts).to_json() + "\n";
  } else {
    std::vector<SldResult> sld(s.size());
    parallel_for(s.size(), [&](std::size_t i) { sld[i] = qfi_sld(src, sys, s[i], opts); });
    nlohmann::ordered_json j;
    j["schema"] = "v1";
    j["family"] = family_name(src);
    j["params"] = params_string(src);
    j["eta"] = sys.eta();
    auto& pts = j["points"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double analytic = qfi(src, sys, s[i]);
      pts.push_back({{"s", s[i]},
                     {"oracle", sld[i].qfi},
                     {"analytic", analytic},
                     {"rel_dev", analytic != 0.0 ? std::abs(sld[i].qfi - analytic) / analytic : sld[i].qfi},
                     {"K", sld[i].K},
                     {"n_max", sld[i].n_max},
                     {"dim", sld[i].dim},
                     {"fd_step", sld[i].fd_step},
                     {"tail_mass", sld[i].truncation_report.tail_mass},
                     {"basis_residual", sld[i].truncation_report.basis_residual}});
    }
    text = j.dump(2) + "\n";
  }
  emit(c.output, out, text);
  return kOk;
}

struct MeasureOpts {
  int n_plus = 0;
  int n_minus = 2;
  double s = 0.5;
  int shots = 10000;
  int repeats = 200;
  std::uint64_t seed = 1;
  std::string grid;
  std::string samples;
};

int cmd_measure(const Common& c, const MeasureOpts& m, std::ostream& out) {
  const auto sys = make_system(c);
  const FockPM src{m.n_plus, m.n_minus};
  try {
    validate(src);
  } catch (const Error& e) {
    throw ConfigError(std::string("--Nplus/--Nminus: ") + e.what());
  }
  if (!(m.s > 0.0)) throw ConfigError("--s: true separation must be positive");
  if (m.shots < 1) throw ConfigError("--shots: must be >= 1");
  if (m.repeats < 100) throw ConfigError("--repeats: must be >= 100");
  SearchGrid grid = SearchGrid::rayleigh(sys.rayleigh_length());
  if (!m.grid.empty()) {
    const auto at = m.grid.find('@');
    const std::string body = m.grid.substr(0, at);
    const auto a = body.find(':');
    const auto b = body.find(':', a == std::string::npos ? a : a + 1);
    try {
      if (a == std::string::npos || b == std::string::npos) throw std::invalid_argument("format");
      grid.s_min = std::stod(body.substr(0, a));
      grid.s_max = std::stod(body.substr(a + 1, b - a - 1));
      grid.points = std::stoi(body.substr(b + 1));
    } catch (const std::exception&) {
      throw ConfigError("--grid: expected min:max:points[@geometric|@linear]");
    }
    grid.geometric = at == std::string::npos || m.grid.substr(at + 1) == "geometric";
    if (!(grid.s_min > 0.0) || !(grid.s_max > grid.s_min) || grid.points < 2)
      throw ConfigError("--grid: needs 0 < min < max and points >= 2");
  }
  if (!m.samples.empty()) {
    std::ostringstream csv;
    write_samples_csv(sample_counts(src, sys, m.s, m.shots, m.seed, 0), csv);
    emit(m.samples, out, csv.str());
  }
  emit(c.output, out, crb_benchmark(src, sys, m.s, m.shots, m.repeats, m.seed, grid).to_json() + "\n");
  return kOk;
}

int cmd_figures(const std::string& dir, const std::string& grid_spec) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoFailure, "cannot create directory '" + dir + "'");
  const auto s = grid_of(grid_spec);
  const auto psf = PsfModel::gaussian(1.0);
  const double etas[] = {0.1, 0.4, 0.5};

  auto write = [&](const std::string& name, const Table& t) {
    std::ostringstream text;
    write_table(t, "csv", text);
    emit((fs::path(dir) / name).string(), std::cout, text.str());
  };
  auto sweep = [&](Table& t, auto&& row) {
    t.rows.resize(s.size());
    parallel_for(s.size(), [&](std::size_t i) { t.rows[i] = row(s[i]); });
  };

  Table fig2{{"s", "bound_eta0.1", "bound_eta0.4", "bound_eta0.5"}, {}};
  sweep(fig2, [&](double x) {
    std::vector<Cell> r{x};
    for (double eta : etas) {
      const auto [fp, fm] = f_functions(ImagingSystem(eta, psf), x);
      r.push_back(std::max(fp, fm));
    }
    return r;
  });
  write("fig2.csv", fig2);

  const double thermal_eta = 0.1;
  const ImagingSystem th_sys(thermal_eta, psf);
  Table fig3{{"s", "thermal_etaN0.01", "thermal_etaN1", "thermal_semiclassical"}, {}};
  sweep(fig3, [&](double x) {
    std::vector<Cell> r{x};
    for (double etaN : {0.01, 1.0}) r.push_back(qfi_report(Thermal{etaN / thermal_eta}, th_sys, x).qfi_normalized);
    r.push_back(qfi_thermal_semiclassical_normalized(th_sys, x));
    return r;
  });
  write("fig3.csv", fig3);

  const std::pair<double, double> tmsv_cases[] = {{0.1, 0.5}, {1.0, 0.01}, {10.0, 0.1}};
  Table fig4{{"s", "tmsv_xi0.1_eta0.5", "tmsv_xi1_eta0.01", "tmsv_xi10_eta0.1"}, {}};
  sweep(fig4, [&](double x) {
    std::vector<Cell> r{x};
    for (const auto& [xi, eta] : tmsv_cases)
      r.push_back(qfi_report(Tmsv{xi}, ImagingSystem(eta, psf), x, kAdjudicatedTmsvVariant).qfi_normalized);
    return r;
  });
  write("fig4.csv", fig4);

  Table fig5{{"s", "f_plus_eta0.1", "f_minus_eta0.1", "f_plus_eta0.4", "f_minus_eta0.4", "f_plus_eta0.5",
              "f_minus_eta0.5"},
             {}};
  sweep(fig5, [&](double x) {
    std::vector<Cell> r{x};
    for (double eta : etas) {
      const auto [fp, fm] = f_functions(ImagingSystem(eta, psf), x);
      r.push_back(fp);
      r.push_back(fm);
    }
    return r;
  });
  write("fig5.csv", fig5);

  const double corr_eta = 1e-4;
  const ImagingSystem corr_sys(corr_eta, psf);
  Table fig6{{"s", "corr_thermal_w-0.5", "corr_thermal_w-1"}, {}};
  sweep(fig6, [&](double x) {
    std::vector<Cell> r{x};
    for (double w : {-0.5, -1.0}) r.push_back(qfi_report(CorrThermal{1.0, w}, corr_sys, x).qfi_normalized);
    return r;
  });
  write("fig6.csv", fig6);

  nlohmann::ordered_json m;
  m["schema"] = "v1";
  m["code_version"] = kVersion;
  m["grid"] = grid_spec;
  m["psf"] = {{"kind", "gaussian"}, {"x_R", 1.0}};
  m["tmsv_variant"] = std::string(to_string(kAdjudicatedTmsvVariant));
  auto fig = [](const char* file, const char* quantity, nlohmann::ordered_json params, const Table& t) {
    return nlohmann::ordered_json{{"file", file}, {"quantity", quantity}, {"parameters", params}, {"columns", t.header}};
  };
  m["figures"] = {
      fig("fig2.csv", "x_R^2 bound / (2 eta N)", {{"eta", {0.1, 0.4, 0.5}}, {"N", 1.0}}, fig2),
      fig("fig3.csv", "thermal x_R^2 QFI / (2 eta N)", {{"eta", thermal_eta}, {"etaN", {"0.01", "1", "infinity"}}},
          fig3),
      fig("fig4.csv", "TMSV x_R^2 QFI / (eta (cosh 2xi - 1))",
          {{"xi_eta", {{0.1, 0.5}, {1.0, 0.01}, {10.0, 0.1}}}, {"variant", to_string(kAdjudicatedTmsvVariant)}}, fig4),
      fig("fig5.csv", "f_plus, f_minus", {{"eta", {0.1, 0.4, 0.5}}}, fig5),
      fig("fig6.csv", "correlated thermal x_R^2 QFI / (2 eta N)", {{"eta", corr_eta}, {"N", 1.0}, {"w", {-0.5, -1.0}}},
          fig6),
  };
  emit((fs::path(dir) / "manifest.json").string(), std::cout, m.dump(2) + "\n");
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure:
      return kIo;
    case ErrorCode::TruncationBudgetExceeded:
    case ErrorCode::CutoffOverflow:
    case ErrorCode::IllConditioned:
    case ErrorCode::EpsilonNegative:
    case ErrorCode::QuadratureDomainTooSmall:
    case ErrorCode::FlatLikelihood:
    case ErrorCode::NonFinite:
    case ErrorCode::DegenerateAngle:
    case ErrorCode::ZeroInformation:
      return kNumeric;
    default:
      return kConfig;
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  auto to_double = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("'" + spec + "' is not a grid (min:max:points[@geometric], a,b,c or a value)");
    }
  };
  if (spec.find(':') == std::string::npos) {
    std::vector<double> out;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_double(item));
    if (out.empty()) throw ConfigError("empty grid");
    for (double v : out)
      if (v < 0.0) throw ConfigError("separations must be >= 0");
    return out;
  }
  std::string body = spec;
  bool geometric = false;
  if (const auto at = spec.find('@'); at != std::string::npos) {
    const std::string kind = spec.substr(at + 1);
    if (kind == "geometric") geometric = true;
    else if (kind != "linear") throw ConfigError("unknown spacing '@" + kind + "'");
    body = spec.substr(0, at);
  }
  const auto a = body.find(':');
  const auto b = body.find(':', a + 1);
  if (b == std::string::npos) throw ConfigError("'" + spec + "' needs min:max:points");
  const double lo = to_double(body.substr(0, a));
  const double hi = to_double(body.substr(a + 1, b - a - 1));
  const double pts = to_double(body.substr(b + 1));
  if (pts < 1 || pts != std::floor(pts)) throw ConfigError("point count must be a positive integer");
  if (lo < 0.0 || hi < lo) throw ConfigError("needs 0 <= min <= max");
  if (geometric && !(lo > 0.0)) throw ConfigError("geometric spacing needs min > 0");
  const int n = static_cast<int>(pts);
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double f = double(i) / (n - 1);
    out[i] = geometric ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo);
  }
  out.back() = hi;
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separation-estimation quantum Fisher information toolkit", "rqfi"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common c_fn, c_bound, c_qfi, c_oracle, c_measure;
  auto* functionals_cmd = app.add_subcommand("functionals", "PSF overlap functionals and f+/- on an s grid");
  add_common(functionals_cmd, c_fn);

  double bound_N = 1.0;
  auto* bound_cmd = app.add_subcommand("bound", "QFI upper bound for 2N mean source photons");
  add_common(bound_cmd, c_bound);
  bound_cmd->add_option("--N", bound_N, "mean photons per source")->capture_default_str();

  SourceOpts so_qfi;
  std::string variant(to_string(kAdjudicatedTmsvVariant));
  auto* qfi_cmd = app.add_subcommand("qfi", "exact QFI of a source family");
  add_common(qfi_cmd, c_qfi);
  add_source(qfi_cmd, so_qfi, true);
  qfi_cmd->add_option("--variant", variant, "TMSV variant: as_printed or squared_derivative")->capture_default_str();

  SourceOpts so_oracle;
  so_oracle.xi = 0.3;
  c_oracle.s = "0.5,1,2";
  OracleOptions oracle_opts;
  bool no_richardson = false;
  auto* oracle_cmd = app.add_subcommand("oracle", "truncated Fock-space SLD oracle; TMSV variant adjudication");
  add_common(oracle_cmd, c_oracle);
  add_source(oracle_cmd, so_oracle, false, "tmsv");
  oracle_cmd->add_option("--K", oracle_opts.K, "Hermite-Gauss modes (0: automatic)")->capture_default_str();
  oracle_cmd->add_option("--nmax", oracle_opts.n_max, "total photon cap (-1: automatic)")->capture_default_str();
  oracle_cmd->add_option("--fd-step", oracle_opts.fd_step, "finite-difference step in units of x_R")->capture_default_str();
  oracle_cmd->add_option("--tail-budget", oracle_opts.photon_tail_budget, "photon tail budget")->capture_default_str();
  oracle_cmd->add_flag("--no-richardson", no_richardson, "report the half-step estimate without extrapolation");

  MeasureOpts mo;
  auto* measure_cmd = app.add_subcommand("measure", "parity-counting ML estimator against the Cramer-Rao bound");
  add_common(measure_cmd, c_measure, false);
  measure_cmd->add_option("--Nplus", mo.n_plus, "photons in the symmetric source mode")->capture_default_str();
  measure_cmd->add_option("--Nminus", mo.n_minus, "photons in the antisymmetric source mode")->capture_default_str();
  measure_cmd->add_option("--s", mo.s, "true separation")->capture_default_str();
  measure_cmd->add_option("--shots", mo.shots, "shots per estimate")->capture_default_str();
  measure_cmd->add_option("--repeats", mo.repeats, "independent estimates")->capture_default_str();
  measure_cmd->add_option("--seed", mo.seed, "random seed")->capture_default_str();
  measure_cmd->add_option("--grid", mo.grid, "estimation grid min:max:points[@geometric] (default 0.05:6:400 x_R)");
  measure_cmd->add_option("--samples", mo.samples, "also write the first repeat's counts as CSV");

  std::string fig_dir = "figures";
  std::string fig_grid = "0.02:6:300";
  auto* figures_cmd = app.add_subcommand("figures", "regenerate all figure data as CSV plus manifest.json");
  figures_cmd->add_option("--out,-o", fig_dir, "output directory")->capture_default_str();
  figures_cmd->add_option("--s", fig_grid, "s / x_R grid")->capture_default_str();

  std::vector<std::string> argv{"rqfi"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfig;
  }

  try {
    if (*functionals_cmd) return cmd_functionals(c_fn, out);
    if (*bound_cmd) return cmd_bound(c_bound, bound_N, out);
    if (*qfi_cmd) return cmd_qfi(c_qfi, so_qfi, variant, out);
    if (*oracle_cmd) {
      oracle_opts.richardson = !no_richardson;
      return cmd_oracle(c_oracle, so_oracle, oracle_opts, out);
    }
    if (*measure_cmd) return cmd_measure(c_measure, mo, out);
    if (*figures_cmd) return cmd_figures(fig_dir, fig_grid);
  } catch (const ConfigError& e) {
    err << "rqfi: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    std::string what = e.what();
    if (e.code() == ErrorCode::EtaOutOfRange) what = "--eta: " + what;
    err << "rqfi: " << what << '\n';
    return code;
  }
  return kConfig;
}

}  // namespace rqfi::cli
