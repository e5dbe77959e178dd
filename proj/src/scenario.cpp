#include "pnss/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "pnss/csv.hpp"

namespace pnss {

using nlohmann::json;

namespace {

/// Reads one JSON object, tracking which keys were consumed.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
    return x;
  }

  double positive(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(field(key), "must be > 0");
    return x;
  }

  double non_negative(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x >= 0.0)) throw ConfigError(field(key), "must be >= 0");
    return x;
  }

  long integer(const std::string& key, long fallback) {
    if (!take(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!take(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!take(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!take(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(field(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<double> pair(const std::string& key, std::vector<double> fallback) {
    auto v = numbers(key, std::move(fallback));
    if (v.size() != 2) throw ConfigError(field(key), "expected exactly two numbers");
    return v;
  }

  Section sub(const std::string& key) {
    take(key);
    static const json empty = json::object();
    return Section(obj_.contains(key) ? obj_.at(key) : empty, field(key));
  }

  void finish() const {
    for (const auto& item : obj_.items())
      if (!seen_.count(item.key())) throw ConfigError(field(item.key()), "unknown field");
  }

 private:
  bool take(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

PhysicalParams parse_params(Section s) {
  const auto d = PhysicalParams::rb87_defaults();
  auto mhz = [&](const char* key, double fallback_rad) {
    return mhz_to_rad_per_s(s.number(key, rad_per_s_to_mhz(fallback_rad)));
  };
  PhysicalParams p{};
  p.g = mhz("g", d.g);
  p.k = mhz("k", d.k);
  p.gamma_sp = mhz("gamma_sp", d.gamma_sp);
  p.omega1 = mhz("omega1", d.omega1);
  p.omega2 = s.has("omega2") ? mhz("omega2", d.omega2) : (s.number("omega2", 0.0), p.omega1);
  p.delta = mhz("delta", d.delta);
  p.delta_B_ground = mhz("delta_B_ground", d.delta_B_ground);
  p.delta_B_excited = mhz("delta_B_excited", d.delta_B_excited);
  p.phi2 = s.number("phi2", d.phi2);
  p.atom_mass = s.number("atom_mass", d.atom_mass);
  p.wavelength = s.number("wavelength", d.wavelength);
  s.finish();
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("params", e.what());
  }
  return p;
}

SuperpositionState parse_state(Section s, std::vector<std::string>& warnings) {
  auto amp = [&](const char* key, std::vector<double> fallback) {
    const auto v = s.pair(key, std::move(fallback));
    return cplx{v[0], v[1]};
  };
  const cplx m1 = amp("c_m1", {0.83666002653407554, 0.0});
  const cplx z = amp("c_0", {0.54772255750516611, 0.0});
  const cplx p1 = amp("c_p1", {0.0, 0.0});
  s.finish();
  const double norm = std::norm(m1) + std::norm(z) + std::norm(p1);
  const double dev = std::abs(norm - 1.0);
  if (dev <= SuperpositionState::kNormTolerance) return {m1, z, p1};
  if (dev < 1e-6) {
    std::ostringstream msg;
    msg << "initial_state: renormalized (sum |c|^2 was " << std::setprecision(17) << norm << ")";
    warnings.push_back(msg.str());
    return SuperpositionState::normalized(m1, z, p1);
  }
  std::ostringstream msg;
  msg << "amplitudes not normalized (sum |c|^2 = " << std::setprecision(17) << norm << ")";
  throw ConfigError("initial_state", msg.str());
}

FreeParameter parse_free(const std::string& s, const std::string& where) {
  if (s == "center") return FreeParameter::center;
  if (s == "amplitude") return FreeParameter::amplitude;
  if (s == "auto") return FreeParameter::automatic;
  throw ConfigError(where, "expected \"center\", \"amplitude\" or \"auto\"");
}

const char* free_name(FreeParameter f) {
  switch (f) {
    case FreeParameter::center:
      return "center";
    case FreeParameter::amplitude:
      return "amplitude";
    case FreeParameter::automatic:
      return "auto";
  }
  return "?";
}

std::string location_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
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

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig c;
  Section root(doc, "");
  c.params = parse_params(root.sub("params"));
  c.initial_state = parse_state(root.sub("initial_state"), c.warnings);

  {
    auto s = root.sub("pulse1");
    c.pulse1.shape = s.string("shape", "gaussian");
    c.pulse1.T1_us = s.positive("T1_us", 0.3);
    c.pulse1.center_us = s.number("center_us", 0.0);
    c.pulse1.times_us = s.numbers("times_us", {});
    c.pulse1.intensity = s.numbers("intensity", {});
    s.finish();
    if (c.pulse1.shape != "gaussian" && c.pulse1.shape != "tabulated")
      throw ConfigError("pulse1.shape", "expected \"gaussian\" or \"tabulated\"");
    if (c.pulse1.shape == "tabulated") {
      try {
        (void)c.make_pulse1();
      } catch (const InvalidArgument& e) {
        throw ConfigError("pulse1", e.what());
      }
    }
  }
  {
    auto s = root.sub("pulse2");
    c.pulse2.mode = s.string("mode", "solve");
    if (c.pulse2.mode != "solve" && c.pulse2.mode != "explicit")
      throw ConfigError("pulse2.mode", "expected \"solve\" or \"explicit\"");
    c.pulse2.family = s.string("family", "gaussian");
    if (c.pulse2.family != "gaussian") throw ConfigError("pulse2.family", "only \"gaussian\" is supported");
    c.pulse2.free = parse_free(s.string("free", "auto"), "pulse2.free");
    const auto t2 = s.pair("T2_range_us", {0.05, 20.0});
    const auto t0 = s.pair("center_range_us", {-1.0, 1.0});
    if (!(t2[0] > 0.0 && t2[1] > t2[0])) throw ConfigError("pulse2.T2_range_us", "need 0 < min < max");
    if (!(t0[1] > t0[0])) throw ConfigError("pulse2.center_range_us", "need min < max");
    c.pulse2.T2_min_us = t2[0];
    c.pulse2.T2_max_us = t2[1];
    c.pulse2.center_min_us = t0[0];
    c.pulse2.center_max_us = t0[1];
    c.pulse2.center_us = s.number("center_us", 0.0);
    c.pulse2.T2_us = s.positive("T2_us", 1.0);
    c.pulse2.tol = s.positive("tol", 1e-6);
    c.pulse2.max_iter = static_cast<int>(s.integer("max_iter", 200));
    if (c.pulse2.max_iter < 1) throw ConfigError("pulse2.max_iter", "must be >= 1");
    c.pulse2.delay_us = s.number("delay_us", 0.0);
    s.finish();
  }
  {
    auto s = root.sub("grid");
    c.grid.span_in_T1 = s.positive("span_in_T1", 6.0);
    const long pts = s.integer("points", 48001);
    if (pts < 2) throw ConfigError("grid.points", "must be >= 2");
    c.grid.points = static_cast<std::size_t>(pts);
    s.finish();
  }
  {
    auto s = root.sub("channel");
    c.channel.L0_km = s.non_negative("L0_km", 0.0);
    c.channel.atten_db_per_km = s.positive("atten_db_per_km", 2.0);
    c.channel.phase_rate = s.number("phase_rate", 0.1);
    c.channel.p_em = s.non_negative("p_em", 1.0);
    c.channel.p_abs = s.non_negative("p_abs", 1.0);
    c.channel.phase_warning = s.positive("phase_warning", 0.5);
    if (c.channel.p_em > 1.0) throw ConfigError("channel.p_em", "must be <= 1");
    if (c.channel.p_abs > 1.0) throw ConfigError("channel.p_abs", "must be <= 1");
    s.finish();
  }
  {
    auto s = root.sub("regime");
    c.regime.min_ratio = s.positive("min_ratio", 5.0);
    s.finish();
  }
  {
    auto s = root.sub("outputs");
    c.outputs.directory = s.string("directory", "out");
    c.outputs.sender = s.boolean("sender", true);
    c.outputs.photonics = s.boolean("photonics", true);
    c.outputs.receiver = s.boolean("receiver", true);
    c.outputs.report = s.boolean("report", true);
    const long stride = s.integer("stride", 1);
    if (stride < 1) throw ConfigError("outputs.stride", "must be >= 1");
    c.outputs.stride = static_cast<std::size_t>(stride);
    s.finish();
  }
  root.finish();
  return c;
}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(location_of(text, e.byte), "JSON syntax error");
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

TimeGrid ScenarioConfig::make_grid() const {
  const double T1 = us_to_s(pulse1.T1_us);
  return TimeGrid::centered(us_to_s(pulse1.center_us), grid.span_in_T1 * T1, grid.points);
}

PulseShape ScenarioConfig::make_pulse1() const {
  if (pulse1.shape == "tabulated") {
    std::vector<double> t(pulse1.times_us.size());
    std::transform(pulse1.times_us.begin(), pulse1.times_us.end(), t.begin(), us_to_s);
    return PulseShape::tabulated(std::move(t), pulse1.intensity);
  }
  return PulseShape::gaussian(us_to_s(pulse1.T1_us), us_to_s(pulse1.center_us));
}

json ScenarioConfig::to_json() const {
  auto mhz = [](double w) { return std::stod(format_number(rad_per_s_to_mhz(w))); };
  auto amp = [](cplx z) { return json::array({z.real(), z.imag()}); };
  json j;
  j["params"] = {{"g", mhz(params.g)},
                 {"k", mhz(params.k)},
                 {"gamma_sp", mhz(params.gamma_sp)},
                 {"omega1", mhz(params.omega1)},
                 {"omega2", mhz(params.omega2)},
                 {"delta", mhz(params.delta)},
                 {"delta_B_ground", mhz(params.delta_B_ground)},
                 {"delta_B_excited", mhz(params.delta_B_excited)},
                 {"phi2", params.phi2},
                 {"atom_mass", params.atom_mass},
                 {"wavelength", params.wavelength}};
  j["initial_state"] = {{"c_m1", amp(initial_state.c_m1())},
                        {"c_0", amp(initial_state.c_0())},
                        {"c_p1", amp(initial_state.c_p1())}};
  j["pulse1"] = {{"shape", pulse1.shape}, {"T1_us", pulse1.T1_us}, {"center_us", pulse1.center_us}};
  if (pulse1.shape == "tabulated") {
    j["pulse1"]["times_us"] = pulse1.times_us;
    j["pulse1"]["intensity"] = pulse1.intensity;
  }
  j["pulse2"] = {{"mode", pulse2.mode},
                 {"family", pulse2.family},
                 {"free", free_name(pulse2.free)},
                 {"T2_range_us", {pulse2.T2_min_us, pulse2.T2_max_us}},
                 {"center_range_us", {pulse2.center_min_us, pulse2.center_max_us}},
                 {"center_us", pulse2.center_us},
                 {"T2_us", pulse2.T2_us},
                 {"tol", pulse2.tol},
                 {"max_iter", pulse2.max_iter},
                 {"delay_us", pulse2.delay_us}};
  j["grid"] = {{"span_in_T1", grid.span_in_T1}, {"points", grid.points}};
  j["channel"] = {{"L0_km", channel.L0_km},
                  {"atten_db_per_km", channel.atten_db_per_km},
                  {"phase_rate", channel.phase_rate},
                  {"p_em", channel.p_em},
                  {"p_abs", channel.p_abs},
                  {"phase_warning", channel.phase_warning}};
  j["regime"] = {{"min_ratio", regime.min_ratio}};
  j["outputs"] = {{"directory", outputs.directory},
                  {"sender", outputs.sender},
                  {"photonics", outputs.photonics},
                  {"receiver", outputs.receiver},
                  {"report", outputs.report},
                  {"stride", outputs.stride}};
  return j;
}

std::string ScenarioConfig::hash() const {
  auto j = to_json();
  j["outputs"].erase("directory");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

SendResult run_send(const ScenarioConfig& config) {
  const auto derived = derive(config.params);
  auto regime = validate_regime(config.params, derived, us_to_s(config.pulse1.T1_us), config.regime);
  const auto grid = config.make_grid();
  auto pulse = config.make_pulse1();
  auto sender = run_sender(config.params, pulse, config.initial_state, grid);
  auto photons = compute_photon_observables(sender, pulse, derived.alpha1, config.initial_state);
  return {derived, std::move(regime), std::move(pulse), std::move(sender), std::move(photons)};
}

namespace {

PulseSolveOptions solve_options(const ScenarioConfig& c) {
  PulseSolveOptions o;
  o.free = c.pulse2.free;
  o.duration_min = us_to_s(c.pulse2.T2_min_us);
  o.duration_max = us_to_s(c.pulse2.T2_max_us);
  o.center_min = us_to_s(c.pulse2.center_min_us);
  o.center_max = us_to_s(c.pulse2.center_max_us);
  o.fixed_center = us_to_s(c.pulse2.center_us);
  o.tol = c.pulse2.tol;
  o.max_iter = c.pulse2.max_iter;
  return o;
}

double max_gamma_deviation(const GammaAmplitudes& a, const GammaAmplitudes& b) {
  double worst = 0.0;
  auto cmp = [&](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  };
  cmp(a.z_0, b.z_0);
  cmp(a.p1_1, b.p1_1);
  cmp(a.p1_2, b.p1_2);
  cmp(a.z_1, b.z_1);
  cmp(a.m1_0, b.m1_0);
  cmp(a.p1_0, b.p1_0);
  return worst;
}

}  // namespace

TransferResult run_transfer(const ScenarioConfig& config) {
  auto send = run_send(config);
  const auto& grid = send.sender.grid;
  const auto& modes = send.photons.fluxes;
  const auto& params = config.params;

  PulseSolveResult pulse2{PulseShape::gaussian(us_to_s(config.pulse2.T2_us), us_to_s(config.pulse2.center_us)),
                          params.omega2,
                          send.derived.G2,
                          0.0,
                          0.0,
                          0,
                          FreeParameter::center,
                          true,
                          "explicit pulse"};
  bool solved = false;
  bool converged = true;
  if (config.pulse2.mode == "solve") {
    solved = true;
    try {
      pulse2 = solve_pulse_shape(modes.Phi1, modes.Phi2, params, grid, solve_options(config));
    } catch (const PulseSolveError& e) {
      pulse2 = e.best();
      converged = false;
    }
  }

  const auto areas = pulse_areas(pulse2.pulse, modes.Phi1, modes.Phi2, pulse2.G2, params.k, grid);
  if (!solved) {
    pulse2.eta_residual = areas.eta.back() - kPi;
    pulse2.zeta_residual = areas.zeta.back() - kPi;
  }

  const auto& c = config.initial_state;
  auto ode = simulate_receiver_ode(pulse2.pulse, modes.Phi1, modes.Phi2, pulse2.G2, params.k,
                                   params.phi2, c, grid);
  ReceiverTrajectory receiver = ode;
  double deviation = std::numeric_limits<double>::quiet_NaN();
  if (is_analytic_phase(params.phi2)) {
    receiver = gamma_analytic(areas, c, params.phi2);
    deviation = max_gamma_deviation(receiver.gamma, ode.gamma);
  }
  receiver.conservation_residual =
      conservation_check(receiver, send.photons.n_out.values, modes.flux_total, params.k);

  auto fin = final_state(receiver, c);
  auto budget = evaluate_channel(config.channel, c);
  const double e2e = budget.weighted_success * fin.fidelity;
  return {std::move(send), std::move(pulse2), solved, converged, std::move(receiver),
          deviation, fin, budget, e2e};
}

json regime_to_json(const RegimeReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"name", e.name}, {"left", e.left}, {"right", e.right}, {"ratio", e.ratio}, {"pass", e.pass}});
  return {{"min_ratio", report.min_ratio}, {"all_pass", report.all_pass()}, {"entries", entries}};
}

json transfer_report(const ScenarioConfig& config, const TransferResult& r) {
  auto amp = [](cplx z) { return json::array({z.real(), z.imag()}); };
  const auto& ph = r.send.photons;
  const auto& res = r.receiver.conservation_residual;
  double res_max = 0.0;
  for (double v : res) res_max = std::max(res_max, std::abs(v));
  const double omega1 = config.params.omega1;

  json j;
  j["config_hash"] = config.hash();
  j["fidelity"] = r.final_state.fidelity;
  j["leakage"] = r.final_state.leakage;
  j["leakage_warning"] = r.final_state.leakage_warning;
  j["final_state"] = {{"c_m1", amp(r.final_state.state.c_m1())},
                      {"c_0", amp(r.final_state.state.c_0())},
                      {"c_p1", amp(r.final_state.state.c_p1())}};
  j["pulse2"] = {{"mode", config.pulse2.mode},
                 {"solved_with", r.solved ? free_name(r.pulse2.solved_with) : "explicit"},
                 {"converged", r.solve_converged},
                 {"T2_us", r.pulse2.pulse.duration() * 1e6},
                 {"center_us", r.pulse2.pulse.center() * 1e6},
                 {"omega2_MHz", rad_per_s_to_mhz(r.pulse2.omega2)},
                 {"omega2_over_omega1", omega1 > 0.0 ? r.pulse2.omega2 / omega1 : 0.0},
                 {"eta_residual", r.pulse2.eta_residual},
                 {"zeta_residual", r.pulse2.zeta_residual},
                 {"iterations", r.pulse2.iterations},
                 {"message", r.pulse2.message}};
  j["success"] = {{"vacuum", r.channel.success_vacuum},
                  {"one_photon", r.channel.success_one},
                  {"two_photon", r.channel.success_two},
                  {"weighted", r.channel.weighted_success},
                  {"end_to_end", r.end_to_end_success},
                  {"weighting", "branch-weighted by |c_p1|^2, |c_0|^2, |c_m1|^2 (composition policy)"}};
  j["channel"] = {{"L0_km", config.channel.L0_km},
                  {"L_att_km", r.channel.L_att_km},
                  {"eta1", r.channel.eta1},
                  {"eta2", r.channel.eta2},
                  {"phase_drift_rad", r.channel.phase_rad},
                  {"phase_warning", r.channel.phase_warning}};
  j["diagnostics"] = {{"R_sn", r.send.derived.R_sn},
                      {"spontaneous_error_estimate", 1.0 / r.send.derived.R_sn},
                      {"G1_MHz", rad_per_s_to_mhz(r.send.derived.G1)},
                      {"alpha1_per_s", r.send.derived.alpha1},
                      {"omega_rec_per_s", r.send.derived.omega_rec},
                      {"theta_inf", r.send.sender.theta.back()},
                      {"n_out_inf", ph.n_out.back()},
                      {"P1_inf", ph.distribution.P1.back()},
                      {"P2_inf", ph.distribution.P2.back()},
                      {"mode_overlap", ph.overlap},
                      {"eta_inf", r.receiver.eta.back()},
                      {"zeta_inf", r.receiver.zeta.back()},
                      {"conservation_residual_max", res_max},
                      {"conservation_residual_end", res.empty() ? 0.0 : res.back()},
                      {"receiver_oracle_max_deviation", r.receiver_oracle_deviation},
                      {"sender_coherences_from_ode", r.send.sender.coherences_from_ode}};
  j["regime"] = regime_to_json(r.send.regime);
  j["warnings"] = config.warnings;
  return j;
}

void write_sender_csv(const std::string& path, const ScenarioConfig& config, const SendResult& r) {
  const auto& s = r.sender;
  const auto& p = s.populations;
  const auto& b = s.beta;
  CsvWriter csv(path, config.hash(),
                {"t_s", "kt", "theta", "sigma_m1", "sigma_0", "sigma_p1", "re_sigma_m1_0",
                 "im_sigma_m1_0", "re_sigma_0_p1", "im_sigma_0_p1", "re_sigma_m1_p1",
                 "im_sigma_m1_p1", "beta2_m1_0", "beta2_0_0", "beta2_0_1", "beta2_p1_0",
                 "beta2_p1_1", "beta2_p1_2"});
  const double k = config.params.k;
  std::vector<double> row(18);
  for (std::size_t i = 0; i < s.grid.size(); i += config.outputs.stride) {
    const double t = s.grid[i];
    row = {t,
           k * t,
           s.theta[i],
           p.sigma_m1[i],
           p.sigma_0[i],
           p.sigma_p1[i],
           p.coh_m1_0[i].real(),
           p.coh_m1_0[i].imag(),
           p.coh_0_p1[i].real(),
           p.coh_0_p1[i].imag(),
           p.coh_m1_p1[i].real(),
           p.coh_m1_p1[i].imag(),
           std::norm(b.m1_0[i]),
           std::norm(b.z_0[i]),
           std::norm(b.z_1[i]),
           std::norm(b.p1_0[i]),
           std::norm(b.p1_1[i]),
           std::norm(b.p1_2[i])};
    csv.row(row);
  }
}

void write_photonics_csv(const std::string& path, const ScenarioConfig& config,
                         const SendResult& r) {
  const auto& ph = r.photons;
  const auto& d = ph.distribution;
  const auto& f = ph.fluxes;
  CsvWriter csv(path, config.hash(),
                {"kt", "P0", "P1", "P2", "flux_total", "flux_I", "flux_II", "n_out", "g2"});
  const double k = config.params.k;
  std::vector<double> row(9);
  for (std::size_t i = 0; i < ph.grid.size(); i += config.outputs.stride) {
    row = {k * ph.grid[i], d.P0[i], d.P1[i], d.P2[i], f.flux_total[i], f.flux_I[i], f.flux_II[i],
           ph.n_out[i], ph.g2.g2[i]};
    csv.row(row);
  }
}

void write_receiver_csv(const std::string& path, const ScenarioConfig& config,
                        const TransferResult& r) {
  const auto& rx = r.receiver;
  const auto& g = rx.gamma;
  CsvWriter csv(path, config.hash(),
                {"kt", "eta", "zeta", "gamma2_0_0", "gamma2_p1_1", "gamma2_p1_2", "gamma2_0_1",
                 "gamma2_m1_0", "gamma2_p1_0", "rho_m1", "rho_0", "rho_p1", "residual"});
  const double k = config.params.k;
  const double delay = us_to_s(config.pulse2.delay_us);
  std::vector<double> row(13);
  for (std::size_t i = 0; i < rx.grid.size(); i += config.outputs.stride) {
    row = {k * (rx.grid[i] + delay),
           rx.eta[i],
           rx.zeta[i],
           std::norm(g.z_0[i]),
           std::norm(g.p1_1[i]),
           std::norm(g.p1_2[i]),
           std::norm(g.z_1[i]),
           std::norm(g.m1_0[i]),
           std::norm(g.p1_0[i]),
           rx.rho_m1[i],
           rx.rho_0[i],
           rx.rho_p1[i],
           rx.conservation_residual.empty() ? 0.0 : rx.conservation_residual[i]};
    csv.row(row);
  }
}

namespace {

constexpr const char* kPopAxis = "initial_state.pop_m1";

json* resolve_axis(json& doc, const std::string& axis) {
  json* node = &doc;
  std::size_t start = 0;
  while (start <= axis.size()) {
    const auto dot = axis.find('.', start);
    const std::string key = axis.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return node;
}

void set_axis(json& doc, const std::string& axis, double value) {
  if (axis == kPopAxis) {
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError(axis, "population must lie in [0, 1]");
    doc["initial_state"] = {{"c_m1", {std::sqrt(value), 0.0}},
                            {"c_0", {std::sqrt(1.0 - value), 0.0}},
                            {"c_p1", {0.0, 0.0}}};
    return;
  }
  json* node = resolve_axis(doc, axis);
  if (node == nullptr) throw ConfigError(axis, "no such config field");
  if (node->is_number_integer()) {
    *node = static_cast<long>(std::llround(value));
  } else {
    *node = value;
  }
}

}  // namespace

SweepTable run_sweep(const ScenarioConfig& base, const std::string& axis, double from, double to,
                     std::size_t points, unsigned threads) {
  if (points < 1) throw ConfigError("sweep", "need at least one point");
  const json doc = base.to_json();
  if (axis != kPopAxis) {
    json probe = doc;
    const json* node = resolve_axis(probe, axis);
    if (node == nullptr) throw ConfigError(axis, "no such config field");
    if (!node->is_number() || node->is_boolean())
      throw ConfigError(axis, "sweep axis must name a scalar numeric field");
  }
  const bool channel_only = axis.rfind("channel.", 0) == 0;

  std::vector<double> values(points);
  for (std::size_t i = 0; i < points; ++i)
    values[i] = points == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);

  SweepTable table;
  table.columns = {axis, "L0_km", "eta1", "eta2", "weighted_success", "phase_rad"};
  if (!channel_only) {
    for (const char* c : {"theta_inf", "n_out_inf", "P1_inf", "P2_inf", "T2_us", "center_us",
                          "omega2_MHz", "eta_residual", "zeta_residual", "fidelity", "leakage",
                          "end_to_end_success", "converged", "conservation_residual_max"})
      table.columns.emplace_back(c);
  }
  table.rows.resize(points);

  auto evaluate = [&](std::size_t i) {
    json point = doc;
    set_axis(point, axis, values[i]);
    const auto cfg = parse_config(point);
    std::vector<double> row{values[i], cfg.channel.L0_km};
    if (channel_only) {
      const auto b = evaluate_channel(cfg.channel, cfg.initial_state);
      row.insert(row.end(), {b.eta1, b.eta2, b.weighted_success, b.phase_rad});
    } else {
      const auto r = run_transfer(cfg);
      double res_max = 0.0;
      for (double v : r.receiver.conservation_residual) res_max = std::max(res_max, std::abs(v));
      const auto& ph = r.send.photons;
      row.insert(row.end(),
                 {r.channel.eta1, r.channel.eta2, r.channel.weighted_success, r.channel.phase_rad,
                  r.send.sender.theta.back(), ph.n_out.back(), ph.distribution.P1.back(),
                  ph.distribution.P2.back(), r.pulse2.pulse.duration() * 1e6,
                  r.pulse2.pulse.center() * 1e6, rad_per_s_to_mhz(r.pulse2.omega2),
                  r.pulse2.eta_residual, r.pulse2.zeta_residual, r.final_state.fidelity,
                  r.final_state.leakage, r.end_to_end_success, r.solve_converged ? 1.0 : 0.0,
                  res_max});
    }
    table.rows[i] = std::move(row);
  };

  unsigned n_threads = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, points));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points; i = next++) {
      try {
        evaluate(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = points;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return table;
}

void write_sweep_csv(const std::string& path, const ScenarioConfig& config, const SweepTable& t) {
  CsvWriter csv(path, config.hash(), t.columns);
  for (const auto& row : t.rows) csv.row(row);
}

}  // namespace pnss
