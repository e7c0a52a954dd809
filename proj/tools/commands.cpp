#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phaseloss/bounds.hpp"
#include "phaseloss/error.hpp"
#include "phaseloss/figures.hpp"
#include "phaseloss/measurement.hpp"
#include "phaseloss/multipass.hpp"
#include "phaseloss/verify.hpp"

namespace phaseloss::cli {
namespace {

constexpr const char* kOutputDirEnv = "PHASELOSS_OUTPUT_DIR";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double eta = 0.9;
  double theta = 0.0;
  double deta = 0.0;
  double dtheta = 1.0;
  double n_mean = 100.0;
  std::optional<double> n_sq;
  std::optional<double> squeeze_db;
  bool optimal = false;

  std::int64_t passes = 0;
  double eta_prep = 1.0;
  double eta_det = 1.0;
  double eta_round = 1.0;

  std::string measurement = "homodyne";
  std::string intensity_mode = "moment-matched";
  std::int64_t samples = 10000;
  std::int64_t trials = 2000;
  std::uint64_t seed = 1;
  int threads = 1;
  bool sufficient_statistics = false;
  double band_lo = 0.9;
  double band_hi = 1.1;
  std::string dump_samples;

  std::string figure;
  int grid_points = 999;
  std::vector<double> n_values;
  std::vector<double> db_values;
  bool coherent_only = false;

  std::string out;
  std::string format;
  bool verbose = false;
};

struct Row {
  std::string quantity;
  double value;
  std::string units;
};

ChannelPoint channel(const Options& o) { return {o.eta, o.theta, o.deta, o.dtheta}; }

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void validate_common(const Options& o) {
  require(std::isfinite(o.eta) && o.eta >= 0.0 && o.eta <= 1.0, "--eta must lie in [0, 1]");
  require(std::isfinite(o.theta) && std::isfinite(o.deta) && std::isfinite(o.dtheta),
          "--theta, --deta and --dtheta must be finite");
  require(std::isfinite(o.n_mean) && o.n_mean > 0.0, "--n-mean must be positive");
  if (o.n_sq) require(*o.n_sq >= 0.0 && *o.n_sq <= o.n_mean, "--n-sq must lie in [0, n-mean]");
  if (o.squeeze_db) require(*o.squeeze_db >= 0.0 && std::isfinite(*o.squeeze_db), "--squeeze-db must be >= 0");
  require(o.format.empty() || o.format == "csv" || o.format == "json", "--format must be csv or json");
}

double fixed_squeezing(const Options& o) {
  if (o.n_sq) return *o.n_sq;
  if (o.squeeze_db) return squeeze_photons_from_r(squeeze_r_from_db(*o.squeeze_db));
  return 0.0;
}

std::string resolve_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p.string();
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  const std::string path = resolve_path(o.out);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + path);
  f << text;
}

std::string csv_rows(const std::vector<Row>& rows) {
  std::string s = "quantity,value,units\n";
  for (const auto& r : rows) s += r.quantity + "," + format_number(r.value) + "," + r.units + "\n";
  return s;
}

std::string json_rows(const std::vector<Row>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back({{"quantity", r.quantity}, {"value", r.value}, {"units", r.units}});
  return j.dump(2) + "\n";
}

int cmd_bounds(const Options& o, std::ostream& out) {
  validate_common(o);
  const ChannelPoint ch = channel(o);
  const double n = o.n_mean;
  const double n_sq_d = o.optimal ? optimal_squeezing_cple(o.eta, n).n_sq : fixed_squeezing(o);
  const double n_sq_n = o.optimal ? dae_optimal_squeezing(n) : fixed_squeezing(o);
  require(n_sq_d < n, "D needs a displaced probe (n-sq < n-mean)");
  const ProbeSpec probe{n, n_sq_d, optimal_squeeze_angle(ch), 0.0};
  const double r = o.squeeze_db && !o.optimal ? squeeze_r_from_db(*o.squeeze_db) : squeeze_r_from_photons(n_sq_d);

  const double q_eta = quantum_limit_dae(o.eta, n);
  const double s_eta = sql_dae(o.eta, n);
  const double delta = large_alpha_advantage(r, o.eta);
  const std::vector<Row> rows = {
      {"Q_chi", quantum_limit_cple(ch, n), "1/chi^2"},
      {"S_chi", sql_cple(ch, n), "1/chi^2"},
      {"D", displacement_info(ch, probe), "1/chi^2"},
      {"homodyne_FI", homodyne_fi(ch, probe), "1/chi^2"},
      {"Q_eta", q_eta, "1/eta^2"},
      {"S_eta", s_eta, "1/eta^2"},
      {"N", dae_info(o.eta, n, dae_number_variance(n, n_sq_n)), "1/eta^2"},
      {"Q_eta/S_eta", q_eta / s_eta, "ratio"},
      {"Delta", delta, "ratio"},
      {"sqrt(Delta/(Q_eta/S_eta))", std::sqrt(delta / (q_eta / s_eta)), "ratio"},
      {"n_sq_D", n_sq_d, "photons"},
      {"n_sq_N", n_sq_n, "photons"},
      {"squeezing_dB", squeeze_db_from_r(r), "dB"},
  };
  emit(o, o.format == "json" ? json_rows(rows) : csv_rows(rows), out);
  return kSuccess;
}

int cmd_figure(const Options& o, std::ostream& out) {
  require(o.grid_points >= 1, "--grid-points must be >= 1");
  require(o.format.empty() || o.format == "csv", "figures are written as csv");
  for (double n : o.n_values) require(std::isfinite(n) && n > 0.0, "--n-values must be positive");
  for (double db : o.db_values) require(std::isfinite(db) && db >= 0.0, "--db-values must be >= 0");
  const auto eta = open_eta_grid(o.grid_points);
  const auto levels = o.n_values.empty() ? default_photon_levels() : o.n_values;
  FigureData fig;
  if (o.figure == "fig2a") {
    fig = figure_2a(eta, levels);
  } else if (o.figure == "fig2b") {
    fig = figure_2b(eta, levels, !o.coherent_only);
  } else {
    fig = figure_2c(eta, o.db_values.empty() ? default_squeezing_levels_db() : o.db_values);
  }
  std::string s = "eta";
  for (const auto& c : fig.curves) s += "," + c.label;
  s += ",sql\n";
  for (std::size_t k = 0; k < eta.size(); ++k) {
    s += format_number(eta[k]);
    for (const auto& c : fig.curves) s += "," + format_number(c.values[k]);
    s += "," + format_number(fig.sql[k]) + "\n";
  }
  emit(o, s, out);
  return kSuccess;
}

int cmd_multipass(const Options& o, std::ostream& out, std::ostream& err) {
  validate_common(o);
  require(o.eta > 0.0 && o.eta < 1.0, "multipass needs 0 < eta < 1");
  require(o.passes >= 0, "--passes must be >= 0 (0 chooses the range automatically)");
  const ChannelPoint ch = channel(o);
  MultipassSetup setup{1, o.eta_prep, o.eta_det, o.eta_round};
  setup.validate();

  const PassSearch incident = optimal_passes(ch, setup, PassObjective::PerIncidentPhoton);
  const PassSearch lost = optimal_passes(ch, setup, PassObjective::PerLostPhoton);
  const std::int64_t last =
      o.passes > 0 ? o.passes
                   : std::min(std::max<std::int64_t>({2 * incident.k_opt, 2 * lost.k_opt, 10}),
                              std::max(incident.k_max, lost.k_max));

  nlohmann::json rows = nlohmann::json::array();
  std::string csv = "k,eta_eff,sql_k,q_k,fi_per_incident_photon,fi_per_lost_photon,k_opt\n";
  for (std::int64_t k = 1; k <= last; ++k) {
    setup.passes = k;
    const MultipassBounds b = multipass_bounds(ch, o.n_mean, setup);
    const double per_incident = b.sql_k / incident_photons(o.eta, o.n_mean, k);
    const double per_lost = b.sql_k / lost_photons(o.eta, o.n_mean, k);
    std::string flag;
    if (k == incident.k_opt) flag = "incident";
    if (k == lost.k_opt) flag += flag.empty() ? "lost" : "+lost";
    csv += std::to_string(k) + "," + format_number(b.eta_eff) + "," + format_number(b.sql_k) + "," +
           format_number(b.q_k) + "," + format_number(per_incident) + "," + format_number(per_lost) + "," +
           flag + "\n";
    rows.push_back({{"k", k}, {"eta_eff", b.eta_eff}, {"sql_k", b.sql_k}, {"q_k", b.q_k},
                    {"fi_per_incident_photon", per_incident}, {"fi_per_lost_photon", per_lost},
                    {"k_opt", flag}});
  }

  setup.passes = 1;
  const MultipassDiagnostics diag = multipass_diagnostics(ch, setup);
  std::string note;
  if (diag.round_trip_dominated) {
    note = "round-trip loss does not exceed the combined preparation and detection loss: non-classical probes "
           "can reduce the RMSE of the best classical multi-pass strategy by at most about 20%";
  } else {
    note = "round-trip loss exceeds the combined preparation and detection loss (eta_round < eta_prep * "
           "eta_det): the bounded advantage of non-classical probes over classical multi-pass does not apply";
  }
  err << "note: " << note << "\n";
  if (incident.capped || lost.capped) err << "warning: pass search reached its limit\n";

  if (o.format == "json") {
    const nlohmann::json j = {{"rows", rows},
                              {"k_opt_per_incident_photon", incident.k_opt},
                              {"k_opt_per_lost_photon", lost.k_opt},
                              {"classical_fraction", diag.classical_fraction},
                              {"rmse_reduction", diag.rmse_reduction},
                              {"round_trip_dominated", diag.round_trip_dominated},
                              {"note", note}};
    emit(o, j.dump(2) + "\n", out);
  } else {
    emit(o, csv, out);
  }
  return kSuccess;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  validate_common(o);
  require(o.format.empty() || o.format == "json", "simulate writes json");
  require(o.band_lo < o.band_hi, "--band-lo must be below --band-hi");
  ExperimentConfig c;
  c.probe = {o.n_mean, o.optimal ? 0.0 : fixed_squeezing(o), 0.0, 0.0};
  c.channel = channel(o);
  if (o.measurement == "homodyne") {
    c.measurement = Measurement::Homodyne;
    if (o.optimal) c.probe.n_sq = optimal_squeezing_cple(o.eta, o.n_mean).n_sq;
  } else {
    c.measurement = Measurement::Intensity;
    if (o.optimal) c.probe.n_sq = dae_optimal_squeezing(o.n_mean);
  }
  c.intensity_mode = o.intensity_mode == "exact-fock" ? IntensityMode::ExactFock : IntensityMode::MomentMatched;
  c.samples = o.samples;
  c.trials = o.trials;
  c.seed = o.seed;
  c.threads = o.threads;
  c.sufficient_statistics = o.sufficient_statistics;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }

  const auto start = std::chrono::steady_clock::now();
  const EstimationReport r = run_experiment(c);
  if (o.verbose) {
    err << "simulate: " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
        << " s\n";
  }
  if (!o.dump_samples.empty()) {
    std::string csv = r.measurement + "\n";
    for (double x : trial_samples(c, 0)) csv += format_number(x) + "\n";
    const std::string path = resolve_path(o.dump_samples);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open sample dump file " + path);
    f << csv;
  }

  nlohmann::json j = r;
  j["band"] = {o.band_lo, o.band_hi};
  const bool inside = r.variance_defined && r.saturation_ratio >= o.band_lo && r.saturation_ratio <= o.band_hi;
  j["within_band"] = inside;
  emit(o, j.dump(2) + "\n", out);
  if (!inside) {
    err << "saturation ratio " << format_number(r.saturation_ratio) << " outside [" << format_number(o.band_lo)
        << ", " << format_number(o.band_hi) << "]\n";
    return kCheckFailed;
  }
  return kSuccess;
}

int cmd_verify(const Options& o, bool single, std::ostream& out, std::ostream& err) {
  validate_common(o);
  require(o.format.empty() || o.format == "json", "verify writes json");
  std::vector<VerifyCase> cases;
  if (single) {
    require(o.n_mean <= 4.0, "verify is limited to n-mean <= 4");
    require(!o.optimal, "--optimal-squeezing is not available for verify");
    cases.push_back({"custom", {o.n_mean, fixed_squeezing(o), optimal_squeeze_angle(channel(o)), 0.0}, channel(o)});
  } else {
    cases = default_verify_suite();
  }
  for (const auto& c : cases) {
    if (c.ch.eta > 1.0 - 1e-4) {
      err << "warning: " << c.id << ": eta = " << format_number(c.ch.eta)
          << " is close to 1; the loss terms diverge as 1 / (1 - eta) and absolute tolerances lose meaning\n";
    }
  }

  DilationCache cache;
  nlohmann::json reports = nlohmann::json::array();
  bool all = true;
  for (const auto& c : cases) {
    try {
      const IdentityReport r = verify_identities(c.spec, c.ch, VarsigmaGrid{}, c.id, &cache);
      all = all && r.all_pass();
      reports.push_back(r);
    } catch (const TruncationError& e) {
      all = false;
      err << "truncation: " << c.id << ": " << e.what() << " (tail mass " << format_number(e.tail_mass()) << ")\n";
      reports.push_back({{"case_id", c.id}, {"error", e.what()}, {"tail_mass", e.tail_mass()}, {"pass", false}});
    } catch (const SingularChannel& e) {
      all = false;
      err << "singular: " << c.id << ": " << e.what() << "\n";
      reports.push_back({{"case_id", c.id}, {"error", e.what()}, {"pass", false}});
    } catch (const NumericError& e) {
      all = false;
      err << "numeric: " << c.id << ": " << e.what() << "\n";
      reports.push_back({{"case_id", c.id}, {"error", e.what()}, {"pass", false}});
    }
  }
  emit(o, nlohmann::json{{"cases", reports}, {"pass", all}}.dump(2) + "\n", out);
  return all ? kSuccess : kCheckFailed;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Quantum limits and strategies for correlated phase and loss estimation", "phaseloss"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file mirroring flag names");

  app.add_option("--eta", o.eta, "channel transmissivity");
  app.add_option("--theta", o.theta, "channel phase");
  app.add_option("--deta", o.deta, "d eta / d chi");
  app.add_option("--dtheta", o.dtheta, "d theta / d chi");
  app.add_option("--n-mean", o.n_mean, "mean photon number of the probe");
  auto* n_sq = app.add_option("--n-sq", o.n_sq, "photons spent on squeezing");
  auto* db = app.add_option("--squeeze-db", o.squeeze_db, "squeezing in dB");
  auto* opt = app.add_flag("--optimal-squeezing", o.optimal, "use the optimal squeezing");
  n_sq->excludes(db)->excludes(opt);
  db->excludes(opt);
  app.add_option("--passes", o.passes, "number of passes (multipass table length)");
  app.add_option("--eta-prep", o.eta_prep, "state preparation efficiency");
  app.add_option("--eta-det", o.eta_det, "detection efficiency");
  app.add_option("--eta-round", o.eta_round, "round-trip efficiency");
  app.add_option("--samples", o.samples, "samples per trial");
  app.add_option("--trials", o.trials, "number of trials");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--threads", o.threads, "worker threads for trials");
  app.add_option("--out", o.out, "output file (relative paths resolve against $PHASELOSS_OUTPUT_DIR)");
  app.add_option("--format", o.format, "csv or json");
  app.add_option("--grid-points", o.grid_points, "interior transmissivity grid points");
  app.add_flag("-v,--verbose", o.verbose, "report timings");

  auto* bounds = app.add_subcommand("bounds", "quantum limits and strategy information");
  auto* figure = app.add_subcommand("figure", "curve families as csv");
  figure->add_option("name", o.figure, "fig2a, fig2b or fig2c")
      ->required()
      ->check(CLI::IsMember({"fig2a", "fig2b", "fig2c"}));
  figure->add_option("--n-values", o.n_values, "photon numbers (fig2a, fig2b)")->delimiter(',');
  figure->add_option("--db-values", o.db_values, "squeezing levels in dB (fig2c)")->delimiter(',');
  figure->add_flag("--coherent", o.coherent_only, "fig2b without squeezing");
  auto* multipass = app.add_subcommand("multipass", "multi-pass bounds over the number of passes");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimation experiment");
  simulate->add_option("--measurement", o.measurement, "homodyne or intensity")
      ->check(CLI::IsMember({"homodyne", "intensity"}));
  simulate->add_option("--intensity-mode", o.intensity_mode, "exact-fock or moment-matched")
      ->check(CLI::IsMember({"exact-fock", "moment-matched"}));
  simulate->add_flag("--sufficient-statistics", o.sufficient_statistics,
                     "draw sample mean and variance directly");
  simulate->add_option("--band-lo", o.band_lo, "lower saturation-ratio bound");
  simulate->add_option("--band-hi", o.band_hi, "upper saturation-ratio bound");
  simulate->add_option("--dump-samples", o.dump_samples, "write the samples of trial 0 as csv");
  auto* verify = app.add_subcommand("verify", "dilation identity checks on truncated Fock states");
  bool single = false;
  verify->add_flag("--single", single, "verify the probe and channel given by the flags instead of the suite");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (bounds->parsed()) return cmd_bounds(o, out);
    if (figure->parsed()) return cmd_figure(o, out);
    if (multipass->parsed()) return cmd_multipass(o, out, err);
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    if (verify->parsed()) return cmd_verify(o, single, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidProbe& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const SingularChannel& e) {
    err << "singular: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace phaseloss::cli
