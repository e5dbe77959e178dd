#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pnss/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kRegime = 3 };

struct Common {
  std::string config;
  std::string out;
  bool strict = false;
  double tol = 0.0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "scenario JSON file (defaults when omitted)");
  app->add_option("--out", c.out, "output directory (overrides outputs.directory)");
  app->add_flag("--strict", c.strict, "exit with status 3 when a regime condition fails");
  app->add_option("--tol", c.tol, "pulse solver tolerance (overrides pulse2.tol)")
      ->check(CLI::PositiveNumber);
}

pnss::ScenarioConfig resolve(const Common& c) {
  pnss::ScenarioConfig cfg = c.config.empty() ? pnss::parse_config(std::string("{}"))
                                              : pnss::load_config(c.config);
  if (!c.out.empty()) cfg.outputs.directory = c.out;
  if (c.tol > 0.0) cfg.pulse2.tol = c.tol;
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  return cfg;
}

fs::path prepare(const pnss::ScenarioConfig& cfg) {
  fs::path dir(cfg.outputs.directory);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw pnss::Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

int regime_status(const pnss::RegimeReport& r, bool strict) {
  for (const auto& name : r.failures()) std::cerr << "regime: " << name << " below " << r.min_ratio << '\n';
  return strict && !r.all_pass() ? kRegime : kOk;
}

int cmd_send(const Common& c) {
  const auto cfg = resolve(c);
  const auto r = pnss::run_send(cfg);
  const auto dir = prepare(cfg);
  if (cfg.outputs.sender) pnss::write_sender_csv((dir / "sender.csv").string(), cfg, r);
  if (cfg.outputs.photonics) pnss::write_photonics_csv((dir / "photonics.csv").string(), cfg, r);
  if (cfg.outputs.report) {
    json j;
    j["config_hash"] = cfg.hash();
    j["diagnostics"] = {{"R_sn", r.derived.R_sn},
                        {"G1_MHz", pnss::rad_per_s_to_mhz(r.derived.G1)},
                        {"alpha1_per_s", r.derived.alpha1},
                        {"theta_inf", r.sender.theta.back()},
                        {"n_out_inf", r.photons.n_out.back()},
                        {"P0_inf", r.photons.distribution.P0.back()},
                        {"P1_inf", r.photons.distribution.P1.back()},
                        {"P2_inf", r.photons.distribution.P2.back()},
                        {"mode_overlap", r.photons.overlap}};
    j["regime"] = pnss::regime_to_json(r.regime);
    j["warnings"] = cfg.warnings;
    write_json(dir / "send_report.json", j);
  }
  std::cout << "theta_inf=" << r.sender.theta.back() << " n_out_inf=" << r.photons.n_out.back()
            << " P1=" << r.photons.distribution.P1.back()
            << " P2=" << r.photons.distribution.P2.back() << '\n';
  return regime_status(r.regime, c.strict);
}

int cmd_transfer(const Common& c, bool write_sender_side) {
  const auto cfg = resolve(c);
  const auto r = pnss::run_transfer(cfg);
  const auto dir = prepare(cfg);
  if (write_sender_side && cfg.outputs.sender)
    pnss::write_sender_csv((dir / "sender.csv").string(), cfg, r.send);
  if (write_sender_side && cfg.outputs.photonics)
    pnss::write_photonics_csv((dir / "photonics.csv").string(), cfg, r.send);
  if (cfg.outputs.receiver) pnss::write_receiver_csv((dir / "receiver.csv").string(), cfg, r);
  if (cfg.outputs.report) write_json(dir / "report.json", pnss::transfer_report(cfg, r));

  std::cout << "T2_us=" << r.pulse2.pulse.duration() * 1e6
            << " center_us=" << r.pulse2.pulse.center() * 1e6
            << " omega2/omega1=" << r.pulse2.omega2 / cfg.params.omega1
            << " fidelity=" << r.final_state.fidelity << " leakage=" << r.final_state.leakage
            << " end_to_end=" << r.end_to_end_success << '\n';
  if (r.final_state.leakage_warning) std::cerr << "warning: leakage " << r.final_state.leakage << '\n';
  if (r.channel.phase_warning) std::cerr << "warning: fiber phase drift " << r.channel.phase_rad << " rad\n";
  if (!r.solve_converged) {
    std::cerr << "pulse solver did not converge: " << r.pulse2.message << '\n';
    return kSolver;
  }
  return regime_status(r.send.regime, c.strict);
}

int cmd_sweep(const Common& c, const std::string& axis, double from, double to, std::size_t points,
              unsigned threads) {
  const auto cfg = resolve(c);
  const auto table = pnss::run_sweep(cfg, axis, from, to, points, threads);
  const auto dir = prepare(cfg);
  pnss::write_sweep_csv((dir / "sweep.csv").string(), cfg, table);
  std::cout << "wrote " << table.rows.size() << " rows to " << (dir / "sweep.csv").string() << '\n';
  const auto it = std::find(table.columns.begin(), table.columns.end(), "converged");
  if (it != table.columns.end()) {
    const auto col = static_cast<std::size_t>(it - table.columns.begin());
    for (const auto& row : table.rows)
      if (row[col] == 0.0) return kSolver;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-number superposition transfer between two cavity-QED nodes"};
  app.require_subcommand(1);

  Common common;
  auto* send = app.add_subcommand("send", "sending node: populations, photon statistics, modes");
  auto* receive = app.add_subcommand("receive", "solve the receiving pulse and map the photons back");
  auto* transfer = app.add_subcommand("transfer", "full send, receive and channel pipeline");
  auto* sweep = app.add_subcommand("sweep", "scan one numeric config field");
  for (auto* sub : {send, receive, transfer, sweep}) add_common(sub, common);

  std::string axis;
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 11;
  unsigned threads = 0;
  sweep->add_option("--axis", axis, "dotted config path, or initial_state.pop_m1")->required();
  sweep->add_option("--from", from, "first value")->required();
  sweep->add_option("--to", to, "last value")->required();
  sweep->add_option("--points", points, "number of samples")->check(CLI::PositiveNumber);
  sweep->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*send) return cmd_send(common);
    if (*receive) return cmd_transfer(common, false);
    if (*transfer) return cmd_transfer(common, true);
    if (*sweep) return cmd_sweep(common, axis, from, to, points, threads);
  } catch (const pnss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const pnss::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const pnss::NumericsError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kSolver;
  } catch (const pnss::PulseSolveError& e) {
    std::cerr << "pulse solver: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
