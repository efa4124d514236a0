#include "jjchain/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "jjchain/config.hpp"
#include "jjchain/errors.hpp"
#include "jjchain/fitting.hpp"
#include "jjchain/io.hpp"
#include "jjchain/kinetics.hpp"
#include "jjchain/spectra.hpp"
#include "jjchain/units.hpp"
#include "jjchain/wave_mixing.hpp"

namespace jjchain {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { quiet, info, debug };

// Log verbosity is the only thing taken from the environment.
LogLevel log_level() {
  const char* v = std::getenv("JJCHAIN_LOG");
  if (!v) return LogLevel::info;
  const std::string s(v);
  if (s == "quiet") return LogLevel::quiet;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::info;
}

struct GlobalOptions {
  std::string config;
  std::string out_dir = "jjchain_out";
  int threads = 1;
  std::string format = "csv";
};

// Collects every file written by a command so the manifest can list them.
class Session {
 public:
  Session(const GlobalOptions& g, std::ostream& out) : g_(g), out_(out), level_(log_level()) {}

  const GlobalOptions& options() const { return g_; }
  TableFormat format() const { return g_.format == "json" ? TableFormat::json : TableFormat::csv; }
  std::string table_ext() const { return g_.format == "json" ? ".json" : ".csv"; }

  const Config& config() {
    if (!config_) {
      if (g_.config.empty()) throw ConfigError("this command needs --config");
      config_ = load_config(g_.config);
    }
    return *config_;
  }
  bool has_config() const { return !g_.config.empty(); }

  void table(const std::string& stem, const Table& t) {
    const std::string name = stem + table_ext();
    write_table(fs::path(g_.out_dir) / name, t, format());
    outputs_.push_back(name);
  }
  void json_file(const std::string& name, const json& j) {
    write_text(fs::path(g_.out_dir) / name, j.dump(2) + "\n");
    outputs_.push_back(name);
  }

  void info(const std::string& line) {
    if (level_ != LogLevel::quiet) out_ << line << '\n';
  }
  void debug(const std::string& line) {
    if (level_ == LogLevel::debug) out_ << line << '\n';
  }

  void manifest(const std::string& command, std::string digest, double wall) {
    RunManifest m;
    m.command = command;
    m.config_digest = config_ ? config_->digest : std::move(digest);
    m.versions = kToolVersion;
    m.outputs = outputs_;
    m.wall_time_s = wall;
    write_text(fs::path(g_.out_dir) / "manifest.json", m.to_json().dump(2) + "\n");
  }

 private:
  const GlobalOptions& g_;
  std::ostream& out_;
  LogLevel level_;
  std::optional<Config> config_;
  std::vector<std::string> outputs_;
};

json fit_json(const FitResult& r) {
  json params = json::object(), errors = json::object();
  for (const auto& n : r.names) {
    params[n] = r.value(n);
    errors[n] = r.std_error(n);
  }
  json cov = json::array();
  for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.covariance.cols(); ++j) row.push_back(r.covariance(i, j));
    cov.push_back(row);
  }
  return {{"names", r.names},   {"params", params},
          {"std_errors", errors}, {"covariance", cov},
          {"residual_norm", r.residual_norm}, {"iterations", r.iterations},
          {"warnings", r.warnings}};
}

std::string fit_summary(const FitResult& r) {
  std::string s;
  for (const auto& n : r.names) s += n + "=" + format_double(r.value(n)) + " ";
  return s;
}

// ---------------------------------------------------------------------------

void cmd_dispersion(Session& s) {
  const Config& c = s.config();
  const ModeTable modes = c.mode_table();
  Table t{{"k", "f_hz", "kappa_ex_hz", "kappa_i_hz", "kappa_hz"}, {}};
  for (int k = 1; k <= modes.k_max(); ++k)
    t.add_row({double(k), angular_to_hz(modes.omega_of(k)), angular_to_hz(modes.kappa_ex_of(k)),
               angular_to_hz(modes.kappa_i_of(k)), angular_to_hz(modes.kappa_of(k))});
  s.table("modes", t);
  const LuttingerParams lp = luttinger_params(c.chain);
  s.info("modes: " + std::to_string(modes.k_max()) + ", f_1 = " + format_double(t.rows.front()[1]) +
         " Hz, K_g = " + format_double(lp.k_g) + ", v_s = " + format_double(lp.v_s_hz) + " Hz");
}

void cmd_matrix_element(Session& s, const std::vector<int>& idx) {
  const Config& c = s.config();
  const MixingProcess proc = mixing_process(idx[0], idx[1], idx[2], idx[3], c.chain);
  json j{{"modes", idx},
         {"multiplicity", proc.multiplicity},
         {"element_rad_per_s", proc.element},
         {"element_hz", angular_to_hz(proc.element)}};
  s.json_file("matrix_element.json", j);
  s.info("multiplicity " + std::to_string(proc.multiplicity) + ", K/2pi = " + format_double(angular_to_hz(proc.element)) +
         " Hz");
}

struct SpectrumSetup {
  SpectrumSettings settings;
  ModeTable modes;
  CascadeSystem sys;
  Eigen::ArrayXd grid;    ///< rad/s
  Eigen::ArrayXd deltas;  ///< rad/s
};

SpectrumSetup spectrum_setup(Session& s) {
  const Config& c = s.config();
  if (!c.spectrum) throw ConfigError("$.spectrum: required for this command");
  SpectrumSetup su;
  su.settings = *c.spectrum;
  su.modes = c.mode_table();
  const auto& st = su.settings;
  su.sys = cascade_system_from_chain(st.readout_k, st.i_max, st.drive, su.modes, c.chain);
  if (st.freqs_prime_hz)
    su.sys.freqs_prime = Eigen::Map<const Eigen::ArrayXd>(st.freqs_prime_hz->data(), su.sys.dimension()) * kTwoPi;
  if (st.coupling_hz) su.sys.couplings.setConstant(hz_to_angular(*st.coupling_hz));
  const double fk = angular_to_hz(su.modes.omega_of(st.readout_k));
  const SweepGrid g = st.grid ? *st.grid : SweepGrid{fk - 20e6, fk + 20e6, 801};
  su.grid = g.values() * kTwoPi;
  su.deltas = st.delta_sweep ? Eigen::ArrayXd(st.delta_sweep->values() * kTwoPi) : Eigen::ArrayXd::Constant(1, st.drive.delta);
  return su;
}

void cmd_spectrum(Session& s, const std::string& model) {
  SpectrumSetup su = spectrum_setup(s);
  const auto& st = su.settings;
  const int k = st.readout_k;
  const double kex = su.modes.kappa_ex_of(k);
  const Eigen::Index c = st.i_max;  // centre row of the ladder
  const int threads = s.options().threads;

  TransmissionMap map;
  map.freq_hz = su.grid / kTwoPi;
  map.delta_hz = su.deltas / kTwoPi;
  if (model == "cascade") {
    map = s21_cascade_map(su.grid, su.deltas, su.sys, st.drive, kex, threads);
  } else {
    map.s21.resize(su.deltas.size(), su.grid.size());
    const double kappa = su.sys.kappas(c);
    for (Eigen::Index r = 0; r < su.deltas.size(); ++r) {
      TransmissionTrace tr;
      if (model == "pairwise") {
        tr = s21_pairwise(su.grid, su.sys.freqs_prime(c), su.sys.freqs_prime(c + 1), su.deltas(r), su.sys.couplings(c),
                          kappa, kex);
      } else {
        tr = s21_two_neighbors(su.grid, su.sys.freqs_prime(c), su.sys.freqs_prime(c - 1), su.sys.freqs_prime(c + 1),
                               su.deltas(r), su.sys.couplings(c), kappa, kex);
      }
      map.s21.row(r) = tr.s21.transpose();
    }
  }

  Table t{{"f_ro_hz", "delta_hz", "re_s21", "im_s21"}, {}};
  for (Eigen::Index r = 0; r < map.s21.rows(); ++r)
    for (Eigen::Index i = 0; i < map.s21.cols(); ++i)
      t.add_row({map.freq_hz(i), map.delta_hz(r), map.s21(r, i).real(), map.s21(r, i).imag()});
  s.table("spectrum_" + model, t);

  json side{{"model", model},
            {"readout_k", k},
            {"i_max", st.i_max},
            {"drive", {{"p", st.drive.p}, {"q", st.drive.q}, {"delta_hz", angular_to_hz(st.drive.delta)},
                       {"n_p", st.drive.n_p}, {"n_q", st.drive.n_q}}},
            {"freqs_prime_hz", std::vector<double>(su.sys.freqs_prime.begin(), su.sys.freqs_prime.end())},
            {"kappas_hz", std::vector<double>(su.sys.kappas.begin(), su.sys.kappas.end())},
            {"couplings_hz", std::vector<double>(su.sys.couplings.begin(), su.sys.couplings.end())},
            {"kappa_ex_hz", angular_to_hz(kex)},
            {"rows", map.s21.rows()},
            {"columns", map.s21.cols()}};
  for (auto key : {"freqs_prime_hz", "kappas_hz", "couplings_hz"})
    for (auto& v : side[key]) v = v.get<double>() / kTwoPi;
  s.json_file("spectrum_" + model + ".meta.json", side);
  s.info(model + " spectrum: " + std::to_string(map.s21.rows()) + " x " + std::to_string(map.s21.cols()) + " points");
}

void cmd_guides(Session& s) {
  SpectrumSetup su = spectrum_setup(s);
  Table t{{"order", "slope", "intercept_hz"}, {}};
  for (const auto& g : resonance_guides(su.sys.freqs_prime, su.settings.side)) t.add_row({double(g.order), g.slope, g.intercept_hz});
  s.table("guides", t);
  s.info(std::to_string(t.rows.size()) + " guide lines");
}

std::optional<KineticState> initial_state(const std::string& path) {
  if (path.empty()) return std::nullopt;
  try {
    return state_from_json(json::parse(read_text(path)));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

KineticState run_ness(Session& s, const KineticModel& model, const std::string& initial) {
  s.debug("channels: " + std::to_string(model.channel_count()));
  const KineticState st = model.solve_ness(initial_state(initial));
  s.info("NESS converged after " + std::to_string(st.steps) + " steps, residual " + format_double(st.residual));
  return st;
}

void cmd_ness_run(Session& s, const std::string& initial) {
  const KineticModel model(s.config().kinetic_config(s.options().threads));
  const KineticState st = run_ness(s, model, initial);
  const auto& cfg = model.config();
  s.json_file("ness_state.json", state_to_json(st));
  Table t{{"k", "f_hz", "n", "n_thermal", "excess_linewidth_hz", "flux_photons_per_s_per_hz"}, {}};
  for (int k = 1; k <= model.k_max(); ++k)
    t.add_row({double(k), angular_to_hz(cfg.modes.omega_of(k)), st.n(k - 1), model.thermal()(k - 1),
               angular_to_hz(st.excess(k - 1)), cfg.flux(k - 1)});
  s.table("ness_state", t);
  Table r{{"refresh", "residual"}, {}};
  for (std::size_t i = 0; i < st.residual_history.size(); ++i) r.add_row({double(i + 1), st.residual_history[i]});
  s.table("ness_residuals", r);
}

void cmd_ness_channels(Session& s, int mode, const std::string& initial) {
  const KineticModel model(s.config().kinetic_config(s.options().threads));
  if (mode < 1 || mode > model.k_max()) throw DomainError("--mode must lie in 1..k_max");
  const KineticState st = run_ness(s, model, initial);
  const DecayAnalysis d = model.decay_channels(mode, st);
  Table t{{"rank", "q1_signed", "q2_signed", "rate_hz", "cumulative_fraction"}, {}};
  for (std::size_t i = 0; i < d.channels.size(); ++i) {
    const auto& ch = d.channels[i];
    t.add_row({double(i + 1), double(ch.s2 * ch.q1), double(ch.s3 * ch.q2), angular_to_hz(ch.rate), d.cumulative[i]});
  }
  s.table("ness_channels_k" + std::to_string(mode), t);
  s.info("mode " + std::to_string(mode) + ": excess linewidth " + format_double(angular_to_hz(d.total)) +
         " Hz, 95% coverage by " + format_double(d.distinct_count_95) + " distinct channels");
}

// ---------------------------------------------------------------------------

Table input_table(const std::string& path) {
  if (path.empty()) throw ConfigError("this command needs --input");
  return read_csv(path);
}

std::string input_digest(const std::string& path) { return sha256_hex(read_text(path)); }

void cmd_fit_dispersion(Session& s, const std::string& input, double length_mm) {
  const Table t = input_table(input);
  if (!(length_mm > 0.0) && s.has_config()) length_mm = s.config().chain.length_mm;
  if (!(length_mm > 0.0)) throw ConfigError("fit dispersion needs --length-mm or length_mm in the config");
  std::vector<DispersionPoint> pts;
  const auto ks = t.column("k"), fs_ = t.column("f_hz");
  for (std::size_t i = 0; i < ks.size(); ++i) pts.push_back({static_cast<int>(ks[i]), fs_[i]});
  const FitResult r = fit_dispersion(pts, length_mm * 1e-3);
  s.json_file("fit_dispersion.json", fit_json(r));
  s.info(fit_summary(r));
}

void cmd_fit_crossing(Session& s, const std::string& input, double delta_hz, bool complex_fit) {
  const Table t = input_table(input);
  TransmissionTrace tr;
  const auto f = t.column("f_hz"), re = t.column("re_s21"), im = t.column("im_s21");
  const auto n = static_cast<Eigen::Index>(f.size());
  tr.freq_hz.resize(n);
  tr.s21.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    tr.freq_hz(i) = f[i];
    tr.s21(i) = {re[i], im[i]};
  }
  CrossingFitOptions opt;
  opt.complex_fit = complex_fit;
  const FitResult r = fit_avoided_crossing(tr, hz_to_angular(delta_hz), opt);
  s.json_file("fit_crossing.json", fit_json(r));
  s.info(fit_summary(r));
  for (const auto& w : r.warnings) s.info("warning: " + w);
}

void cmd_fit_powerlaw(Session& s, const std::string& input) {
  const Table t = input_table(input);
  const auto x = t.column("x"), y = t.column("y");
  const FitResult r = fit_power_law(x, y);
  s.json_file("fit_powerlaw.json", fit_json(r));
  s.info(fit_summary(r));
}

void cmd_fit_gain(Session& s, const std::string& input, GainWindow window) {
  const Table t = input_table(input);
  const auto temp = t.column("temperature_k"), p = t.column("power_w");
  std::vector<GainPoint> pts;
  for (std::size_t i = 0; i < temp.size(); ++i) pts.push_back({temp[i], p[i]});
  const FitResult r = calibrate_gain(pts, window);
  s.json_file("fit_gain.json", fit_json(r));
  s.info(fit_summary(r));
}

KappaConvention convention_of(Session& s, const std::string& flag) {
  if (flag == "angular") return KappaConvention::angular;
  if (flag == "ordinary") return KappaConvention::ordinary;
  return s.has_config() ? s.config().kappa_convention : KappaConvention::angular;
}

void cmd_estimate_occupation(Session& s, const std::string& input, double centre_hz, double width_hz,
                             double kappa_ex_hz, double gain, const std::string& conv) {
  const Table t = input_table(input);
  const auto f = t.column("f_hz"), p = t.column("psd_w_per_hz");
  const auto n = static_cast<Eigen::Index>(f.size());
  const PsdTrace tr = make_psd_trace(Eigen::Map<const Eigen::ArrayXd>(f.data(), n), Eigen::Map<const Eigen::ArrayXd>(p.data(), n),
                                     centre_hz, width_hz);
  const KappaConvention c = convention_of(s, conv);
  const double occ = occupation_from_psd(tr, hz_to_angular(kappa_ex_hz), gain, c);
  s.json_file("estimate_occupation.json", {{"occupation", occ},
                                          {"band_hz", {tr.band_lo_hz, tr.band_hi_hz}},
                                          {"kappa_ex_hz", kappa_ex_hz},
                                          {"gain", gain},
                                          {"kappa_convention", c == KappaConvention::angular ? "angular" : "ordinary"}});
  s.info("occupation " + format_double(occ));
}

void cmd_estimate_photons(Session& s, std::optional<double> p_dbm, std::optional<double> p_w, double gain,
                          double kappa_ex_hz, double f_hz, const std::string& conv) {
  if (p_dbm.has_value() == p_w.has_value()) throw ConfigError("give exactly one of --power-dbm and --power-w");
  const double watts = p_w ? *p_w : dbm_to_watts(*p_dbm);
  const KappaConvention c = convention_of(s, conv);
  const double photons = scattered_photon_estimate(watts, gain, hz_to_angular(kappa_ex_hz), f_hz, c);
  s.json_file("estimate_photons.json", {{"photons", photons},
                                       {"power_w", watts},
                                       {"gain", gain},
                                       {"kappa_ex_hz", kappa_ex_hz},
                                       {"f_hz", f_hz},
                                       {"kappa_convention", c == KappaConvention::angular ? "angular" : "ordinary"}});
  s.info("photons " + format_double(photons));
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimode Josephson chain modelling toolkit", "jjchain"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  app.add_option("--format", g.format, "tabular output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::function<void(Session&)> action;
  std::string digest_source;

  app.add_subcommand("dispersion", "mode frequencies and linewidths")->callback([&] {
    action = [](Session& s) { cmd_dispersion(s); };
  });

  auto* me = app.add_subcommand("matrix-element", "four-wave mixing element K_klmn");
  auto idx = std::make_shared<std::vector<int>>();
  me->add_option("indices", *idx, "k l m n")->expected(4)->required()->check(CLI::PositiveNumber);
  me->callback([&, idx] { action = [idx](Session& s) { cmd_matrix_element(s, *idx); }; });

  auto* spec = app.add_subcommand("spectrum", "driven transmission");
  spec->require_subcommand(1);
  for (const std::string model : {"pairwise", "neighbors", "cascade"})
    spec->add_subcommand(model)->callback([&, model] { action = [model](Session& s) { cmd_spectrum(s, model); }; });

  app.add_subcommand("guides", "resonance guide lines for cascade maps")->callback([&] {
    action = [](Session& s) { cmd_guides(s); };
  });

  auto* ness = app.add_subcommand("ness", "driven steady state");
  ness->require_subcommand(1);
  auto initial = std::make_shared<std::string>();
  auto* ness_run = ness->add_subcommand("run", "solve the kinetic equation");
  ness_run->add_option("--initial", *initial, "state JSON to resume from");
  ness_run->callback([&, initial] { action = [initial](Session& s) { cmd_ness_run(s, *initial); }; });
  auto* ness_ch = ness->add_subcommand("channels", "decay channels of one mode at the steady state");
  auto mode = std::make_shared<int>(0);
  ness_ch->add_option("--mode", *mode, "read-out mode k")->required();
  ness_ch->add_option("--initial", *initial, "state JSON to resume from");
  ness_ch->callback([&, initial, mode] {
    action = [initial, mode](Session& s) { cmd_ness_channels(s, *mode, *initial); };
  });

  auto input = std::make_shared<std::string>();
  auto* fit = app.add_subcommand("fit", "parameter extraction");
  fit->require_subcommand(1);
  auto length_mm = std::make_shared<double>(0.0);
  auto* fd = fit->add_subcommand("dispersion", "fit v and omega_p; CSV columns k,f_hz");
  fd->add_option("--input", *input)->required();
  fd->add_option("--length-mm", *length_mm, "chain length (else taken from the config)");
  fd->callback([&, input, length_mm] {
    digest_source = *input;
    action = [input, length_mm](Session& s) { cmd_fit_dispersion(s, *input, *length_mm); };
  });
  auto delta_hz = std::make_shared<double>(0.0);
  auto complex_fit = std::make_shared<bool>(false);
  auto* fc = fit->add_subcommand("crossing", "fit one avoided crossing; CSV columns f_hz,re_s21,im_s21");
  fc->add_option("--input", *input)->required();
  fc->add_option("--delta-hz", *delta_hz, "pump detuning of the trace");
  fc->add_flag("--complex", *complex_fit, "fit real and imaginary parts with a phase offset");
  fc->callback([&, input, delta_hz, complex_fit] {
    digest_source = *input;
    action = [input, delta_hz, complex_fit](Session& s) { cmd_fit_crossing(s, *input, *delta_hz, *complex_fit); };
  });
  auto* fp = fit->add_subcommand("powerlaw", "log-log regression; CSV columns x,y");
  fp->add_option("--input", *input)->required();
  fp->callback([&, input] {
    digest_source = *input;
    action = [input](Session& s) { cmd_fit_powerlaw(s, *input); };
  });
  auto window = std::make_shared<GainWindow>();
  auto* fg = fit->add_subcommand("gain", "amplifier gain and added noise; CSV columns temperature_k,power_w");
  fg->add_option("--input", *input)->required();
  fg->add_option("--t-min", window->t_min)->capture_default_str();
  fg->add_option("--t-max", window->t_max)->capture_default_str();
  fg->callback([&, input, window] {
    digest_source = *input;
    action = [input, window](Session& s) { cmd_fit_gain(s, *input, *window); };
  });

  auto* est = app.add_subcommand("estimate", "photon-number estimates");
  est->require_subcommand(1);
  auto conv = std::make_shared<std::string>();
  auto gain = std::make_shared<double>(0.0);
  auto kex = std::make_shared<double>(kDefaultKappaExHz);
  auto* eo = est->add_subcommand("occupation", "integrate an emission PSD; CSV columns f_hz,psd_w_per_hz");
  auto centre = std::make_shared<double>(0.0);
  auto width = std::make_shared<double>(kDefaultPsdBandHz);
  eo->add_option("--input", *input)->required();
  eo->add_option("--centre-hz", *centre)->required();
  eo->add_option("--width-hz", *width)->capture_default_str();
  eo->add_option("--gain", *gain)->required();
  eo->add_option("--kappa-ex-hz", *kex)->capture_default_str();
  eo->add_option("--kappa-convention", *conv)->check(CLI::IsMember({"angular", "ordinary"}));
  eo->callback([&, input, centre, width, gain, kex, conv] {
    digest_source = *input;
    action = [=](Session& s) { cmd_estimate_occupation(s, *input, *centre, *width, *kex, *gain, *conv); };
  });
  auto* ep = est->add_subcommand("photons", "photons from an emitted power");
  auto p_dbm = std::make_shared<std::optional<double>>();
  auto p_w = std::make_shared<std::optional<double>>();
  auto f_hz = std::make_shared<double>(0.0);
  ep->add_option("--power-dbm", *p_dbm, "power at the amplifier input, dBm");
  ep->add_option("--power-w", *p_w, "power at the amplifier input, W");
  ep->add_option("--gain", *gain)->required();
  ep->add_option("--kappa-ex-hz", *kex)->capture_default_str();
  ep->add_option("--f-hz", *f_hz)->required();
  ep->add_option("--kappa-convention", *conv)->check(CLI::IsMember({"angular", "ordinary"}));
  ep->callback([&, p_dbm, p_w, gain, kex, f_hz, conv] {
    action = [=](Session& s) { cmd_estimate_photons(s, *p_dbm, *p_w, *gain, *kex, *f_hz, *conv); };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::string command;
  for (const auto& a : args) command += (command.empty() ? "" : " ") + a;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Session session(g, out);
    action(session);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    session.manifest(command, digest_source.empty() ? std::string() : input_digest(digest_source), wall);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << " (last residual " << format_double(e.last_residual()) << ")\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace jjchain
