#include "jjchain/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "jjchain/errors.hpp"
#include "jjchain/units.hpp"

namespace jjchain {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() || it->is_null() ? nullptr : &*it;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (!fallback) fail(at(key), "required key is missing");
      return *fallback;
    }
    if (!v->is_number()) fail(at(key), "expected a number");
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) fail(at(key), "expected a number");
    return v->get<double>();
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (!fallback) fail(at(key), "required key is missing");
      return *fallback;
    }
    if (!v->is_number_integer()) fail(at(key), "expected an integer");
    return v->get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, std::string fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items())
      if (!seen_.count(key)) fail(at(key), "unknown key '" + key + "'");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

ModeRange read_range(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    ObjectReader::fail(path, "expected [first_mode, last_mode]");
  ModeRange r{v[0].get<int>(), v[1].get<int>()};
  if (r.lo < 1 || r.hi < r.lo) ObjectReader::fail(path, "mode range must satisfy 1 <= first <= last");
  return r;
}

SweepGrid read_grid(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  SweepGrid g;
  g.start_hz = r.number("start_hz");
  g.stop_hz = r.number("stop_hz");
  g.points = static_cast<int>(r.integer("points"));
  r.finish();
  if (g.points < 2 || !(g.stop_hz > g.start_hz)) ObjectReader::fail(path, "grid needs points >= 2 and stop > start");
  return g;
}

KineticsSettings read_kinetics(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  KineticsSettings s;
  s.temperature_k = r.number("temperature_k", s.temperature_k);
  s.alpha = r.number("alpha", s.alpha);
  s.dt_factor = r.number("dt_factor", s.dt_factor);
  s.tolerance = r.number("tolerance", s.tolerance);
  s.max_steps = r.integer("max_steps", s.max_steps);
  s.linewidth_update_stride = static_cast<int>(r.integer("linewidth_update_stride", s.linewidth_update_stride));
  s.stability_guard = r.boolean("stability_guard", s.stability_guard);
  if (const json* f = r.find("flux_profile")) {
    const std::string fp = r.at("flux_profile");
    ObjectReader fr(*f, fp);
    FluxProfile flux;
    if (const json* b = fr.find("band")) flux.band = read_range(*b, fr.at("band"));
    flux.psd_dbm_per_hz = fr.optional_number("psd_dbm_per_hz");
    flux.photons_per_s_per_hz = fr.optional_number("photons_per_s_per_hz");
    fr.finish();
    if (flux.psd_dbm_per_hz.has_value() == flux.photons_per_s_per_hz.has_value())
      ObjectReader::fail(fp, "give exactly one of psd_dbm_per_hz and photons_per_s_per_hz");
    if (flux.photons_per_s_per_hz && *flux.photons_per_s_per_hz < 0.0)
      ObjectReader::fail(fr.at("photons_per_s_per_hz"), "flux must be non-negative");
    s.flux = flux;
  }
  if (const json* l = r.find("extra_internal_loss")) {
    const std::string lp = r.at("extra_internal_loss");
    if (!l->is_array()) ObjectReader::fail(lp, "expected an array");
    for (std::size_t i = 0; i < l->size(); ++i) {
      const std::string ep = lp + "[" + std::to_string(i) + "]";
      ObjectReader er((*l)[i], ep);
      LossBlock block;
      const json* m = er.find("modes");
      if (!m) ObjectReader::fail(er.at("modes"), "required key is missing");
      block.modes = read_range(*m, er.at("modes"));
      block.value_hz = er.number("value_hz");
      er.finish();
      if (block.value_hz < 0.0) ObjectReader::fail(er.at("value_hz"), "loss must be non-negative");
      s.extra_internal_loss.push_back(block);
    }
  }
  r.finish();
  if (!(s.temperature_k > 0.0)) ObjectReader::fail(r.at("temperature_k"), "must be positive");
  if (!(s.alpha >= 0.0)) ObjectReader::fail(r.at("alpha"), "must be non-negative");
  if (!(s.dt_factor > 0.0)) ObjectReader::fail(r.at("dt_factor"), "must be positive");
  if (!(s.tolerance > 0.0)) ObjectReader::fail(r.at("tolerance"), "must be positive");
  if (s.max_steps < 1) ObjectReader::fail(r.at("max_steps"), "must be at least 1");
  if (s.linewidth_update_stride < 1) ObjectReader::fail(r.at("linewidth_update_stride"), "must be at least 1");
  return s;
}

SpectrumSettings read_spectrum(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  SpectrumSettings s;
  {
    const json* d = r.find("drive");
    if (!d) ObjectReader::fail(r.at("drive"), "required key is missing");
    ObjectReader dr(*d, r.at("drive"));
    s.drive.p = static_cast<int>(dr.integer("p"));
    s.drive.q = static_cast<int>(dr.integer("q"));
    s.drive.delta = hz_to_angular(dr.number("delta_hz", 0.0));
    s.drive.n_p = dr.number("n_p");
    s.drive.n_q = dr.number("n_q");
    dr.finish();
    try {
      s.drive.validate();
    } catch (const ValidationError& e) {
      ObjectReader::fail(r.at("drive"), e.what());
    }
  }
  if (const json* ro = r.find("readout")) {
    ObjectReader rr(*ro, r.at("readout"));
    s.readout_k = static_cast<int>(rr.integer("k"));
    s.i_max = static_cast<int>(rr.integer("i_max", 1));
    rr.finish();
    if (s.readout_k < 1 || s.i_max < 1) ObjectReader::fail(r.at("readout"), "need k >= 1 and i_max >= 1");
  } else {
    ObjectReader::fail(r.at("readout"), "required key is missing");
  }
  if (const json* fp = r.find("freqs_prime_hz")) {
    if (!fp->is_array() || !std::all_of(fp->begin(), fp->end(), [](const json& x) { return x.is_number(); }))
      ObjectReader::fail(r.at("freqs_prime_hz"), "expected an array of numbers");
    s.freqs_prime_hz = fp->get<std::vector<double>>();
    if (s.freqs_prime_hz->size() != static_cast<std::size_t>(2 * s.i_max + 1))
      ObjectReader::fail(r.at("freqs_prime_hz"), "needs 2 i_max + 1 entries");
  }
  s.coupling_hz = r.optional_number("coupling_hz");
  if (const json* g = r.find("grid")) s.grid = read_grid(*g, r.at("grid"));
  if (const json* g = r.find("delta_sweep")) s.delta_sweep = read_grid(*g, r.at("delta_sweep"));
  const std::string side = r.string("pumping_side", "above");
  if (side == "above") {
    s.side = PumpingSide::above;
  } else if (side == "below") {
    s.side = PumpingSide::below;
  } else {
    ObjectReader::fail(r.at("pumping_side"), "expected 'above' or 'below'");
  }
  r.finish();
  return s;
}

json range_json(const ModeRange& m) { return json::array({m.lo, m.hi}); }

json grid_json(const SweepGrid& g) {
  return {{"start_hz", g.start_hz}, {"stop_hz", g.stop_hz}, {"points", g.points}};
}

json to_resolved(const Config& c) {
  json j;
  j["e_j_hz"] = c.chain.e_j_hz;
  j["e_c_hz"] = c.chain.e_c_hz;
  j["e_g_hz"] = c.chain.e_g_hz;
  j["n_junctions"] = c.chain.n_junctions;
  j["length_mm"] = c.chain.length_mm;
  j["impedance_ohm"] = c.chain.impedance_ohm;
  j["k_max"] = c.k_max;
  j["kappa_ex_hz"] = c.kappa_ex_hz;
  j["kappa_i_hz"] = c.kappa_i_hz;
  j["kappa_convention"] = c.kappa_convention == KappaConvention::angular ? "angular" : "ordinary";
  j["synthetic"] = c.synthetic;
  j["note"] = c.note;
  if (c.dispersion)
    j["dispersion"] = {{"v_m_per_s", c.dispersion->v}, {"f_p_hz", angular_to_hz(c.dispersion->omega_p)}};
  json ov = json::array();
  for (const auto& o : c.overrides) {
    json e{{"k", o.k}};
    if (o.omega) e["f_hz"] = angular_to_hz(*o.omega);
    if (o.kappa_ex) e["kappa_ex_hz"] = angular_to_hz(*o.kappa_ex);
    if (o.kappa_i) e["kappa_i_hz"] = angular_to_hz(*o.kappa_i);
    ov.push_back(e);
  }
  j["mode_overrides"] = ov;

  const auto& k = c.kinetics;
  json kin{{"temperature_k", k.temperature_k},
           {"alpha", k.alpha},
           {"dt_factor", k.dt_factor},
           {"tolerance", k.tolerance},
           {"max_steps", k.max_steps},
           {"linewidth_update_stride", k.linewidth_update_stride},
           {"stability_guard", k.stability_guard}};
  if (k.flux) {
    json f{{"band", range_json(k.flux->band)}};
    if (k.flux->psd_dbm_per_hz) f["psd_dbm_per_hz"] = *k.flux->psd_dbm_per_hz;
    if (k.flux->photons_per_s_per_hz) f["photons_per_s_per_hz"] = *k.flux->photons_per_s_per_hz;
    kin["flux_profile"] = f;
  }
  json loss = json::array();
  for (const auto& b : k.extra_internal_loss) loss.push_back({{"modes", range_json(b.modes)}, {"value_hz", b.value_hz}});
  kin["extra_internal_loss"] = loss;
  j["kinetics"] = kin;

  if (c.spectrum) {
    const auto& s = *c.spectrum;
    json sp{{"drive",
             {{"p", s.drive.p}, {"q", s.drive.q}, {"delta_hz", angular_to_hz(s.drive.delta)}, {"n_p", s.drive.n_p},
              {"n_q", s.drive.n_q}}},
            {"readout", {{"k", s.readout_k}, {"i_max", s.i_max}}},
            {"pumping_side", s.side == PumpingSide::above ? "above" : "below"}};
    if (s.freqs_prime_hz) sp["freqs_prime_hz"] = *s.freqs_prime_hz;
    if (s.coupling_hz) sp["coupling_hz"] = *s.coupling_hz;
    if (s.grid) sp["grid"] = grid_json(*s.grid);
    if (s.delta_sweep) sp["delta_sweep"] = grid_json(*s.delta_sweep);
    j["spectrum"] = sp;
  }
  return j;
}

std::string location_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericError("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error at " + location_of(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }

  Config c;
  ObjectReader r(doc, "$");
  c.chain.e_j_hz = r.number("e_j_hz");
  c.chain.e_c_hz = r.number("e_c_hz");
  c.chain.e_g_hz = r.number("e_g_hz");
  c.chain.n_junctions = static_cast<int>(r.integer("n_junctions"));
  c.chain.length_mm = r.number("length_mm", 0.0);
  c.chain.impedance_ohm = r.number("impedance_ohm", 0.0);
  c.k_max = static_cast<int>(r.integer("k_max", kDefaultKMax));
  c.kappa_ex_hz = r.number("kappa_ex_hz", kDefaultKappaExHz);
  c.kappa_i_hz = r.number("kappa_i_hz", kDefaultKappaIHz);
  c.synthetic = r.boolean("synthetic", false);
  c.note = r.string("note", "");
  const std::string conv = r.string("kappa_convention", "angular");
  if (conv == "angular") {
    c.kappa_convention = KappaConvention::angular;
  } else if (conv == "ordinary") {
    c.kappa_convention = KappaConvention::ordinary;
  } else {
    ObjectReader::fail(r.at("kappa_convention"), "expected 'angular' or 'ordinary'");
  }

  if (const json* d = r.find("dispersion")) {
    ObjectReader dr(*d, r.at("dispersion"));
    DispersionParams disp;
    disp.v = dr.number("v_m_per_s");
    disp.omega_p = hz_to_angular(dr.number("f_p_hz"));
    dr.finish();
    disp.length_m = c.chain.length_mm * 1e-3;
    try {
      disp.validate();
    } catch (const ValidationError& e) {
      ObjectReader::fail(r.at("dispersion"), std::string(e.what()) + " (length_mm must be set)");
    }
    c.dispersion = disp;
  }

  if (const json* ov = r.find("mode_overrides")) {
    if (!ov->is_array()) ObjectReader::fail(r.at("mode_overrides"), "expected an array");
    for (std::size_t i = 0; i < ov->size(); ++i) {
      ObjectReader orr((*ov)[i], r.at("mode_overrides") + "[" + std::to_string(i) + "]");
      ModeOverride o;
      o.k = static_cast<int>(orr.integer("k"));
      if (auto f = orr.optional_number("f_hz")) o.omega = hz_to_angular(*f);
      if (auto f = orr.optional_number("kappa_ex_hz")) o.kappa_ex = hz_to_angular(*f);
      if (auto f = orr.optional_number("kappa_i_hz")) o.kappa_i = hz_to_angular(*f);
      orr.finish();
      c.overrides.push_back(o);
    }
  }

  if (const json* k = r.find("kinetics")) c.kinetics = read_kinetics(*k, r.at("kinetics"));
  if (const json* s = r.find("spectrum")) c.spectrum = read_spectrum(*s, r.at("spectrum"));
  r.finish();

  try {
    c.chain.validate();
    if (c.k_max < 1) throw ValidationError("k_max must be at least 1");
    if (!c.dispersion && c.k_max > c.chain.n_junctions) throw ValidationError("k_max exceeds n_junctions");
    if (!(c.kappa_ex_hz > 0.0) || !(c.kappa_i_hz > 0.0)) throw ValidationError("kappa_ex_hz and kappa_i_hz must be positive");
    for (const auto& o : c.overrides)
      if (o.k < 1 || o.k > c.k_max) throw ValidationError("mode override k=" + std::to_string(o.k) + " outside 1..k_max");
    c.mode_table();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("$: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("$: ") + e.what());
  }

  c.resolved = to_resolved(c);
  c.digest = sha256_hex(c.resolved.dump());
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ModeTable Config::mode_table() const {
  const double kex = hz_to_angular(kappa_ex_hz), ki = hz_to_angular(kappa_i_hz);
  if (dispersion) return build_mode_table(*dispersion, k_max, kex, ki, overrides);
  return build_mode_table(chain, k_max, kex, ki, overrides);
}

KineticConfig Config::kinetic_config(int threads) const {
  KineticConfig kc;
  kc.modes = mode_table();
  kc.chain = chain;
  kc.temperature = kinetics.temperature_k;
  kc.alpha = kinetics.alpha;
  kc.dt_factor = kinetics.dt_factor;
  kc.tolerance = kinetics.tolerance;
  kc.max_steps = kinetics.max_steps;
  kc.linewidth_update_stride = kinetics.linewidth_update_stride;
  kc.stability_guard = kinetics.stability_guard;
  kc.threads = threads;
  const int n = kc.modes.k_max();
  kc.flux = Eigen::ArrayXd::Zero(n);
  if (kinetics.flux) {
    const auto& f = *kinetics.flux;
    for (int k = f.band.lo; k <= std::min(f.band.hi, n); ++k)
      kc.flux(k - 1) = f.photons_per_s_per_hz ? *f.photons_per_s_per_hz
                                              : flux_from_psd(dbm_to_watts(*f.psd_dbm_per_hz), kc.modes.omega_of(k));
  }
  kc.extra_internal_loss = Eigen::ArrayXd::Zero(n);
  for (const auto& b : kinetics.extra_internal_loss)
    for (int k = b.modes.lo; k <= std::min(b.modes.hi, n); ++k) kc.extra_internal_loss(k - 1) += hz_to_angular(b.value_hz);
  return kc;
}

}  // namespace jjchain
