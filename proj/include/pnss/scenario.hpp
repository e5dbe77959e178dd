#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pnss/channel.hpp"
#include "pnss/core.hpp"
#include "pnss/photonics.hpp"
#include "pnss/receiver.hpp"
#include "pnss/sender.hpp"

namespace pnss {

/// Malformed or out-of-range scenario configuration. `where()` is either a
/// "line L, column C" location or a dotted field path.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct Pulse1Config {
  std::string shape = "gaussian";  ///< "gaussian" | "tabulated"
  double T1_us = 0.3;
  double center_us = 0.0;
  std::vector<double> times_us;  ///< tabulated only
  std::vector<double> intensity;
};

struct Pulse2Config {
  std::string mode = "solve";  ///< "solve" | "explicit"
  std::string family = "gaussian";
  FreeParameter free = FreeParameter::automatic;
  double T2_min_us = 0.05;
  double T2_max_us = 20.0;
  double center_min_us = -1.0;
  double center_max_us = 1.0;
  double center_us = 0.0;  ///< explicit center, or the fixed center in amplitude mode
  double T2_us = 1.0;      ///< explicit mode
  double tol = 1e-6;
  int max_iter = 200;
  double delay_us = 0.0;  ///< shifts the receiver CSV time axis only
};

struct GridConfig {
  double span_in_T1 = 6.0;     ///< half-width of the grid in units of T1
  std::size_t points = 48001;  ///< 4000 points per T1 over ±6 T1
};

struct OutputConfig {
  std::string directory = "out";
  bool sender = true;
  bool photonics = true;
  bool receiver = true;
  bool report = true;
  std::size_t stride = 1;  ///< write every stride-th grid row
};

struct ScenarioConfig {
  PhysicalParams params = PhysicalParams::rb87_defaults();
  SuperpositionState initial_state{0.83666002653407554, 0.54772255750516611};
  Pulse1Config pulse1;
  Pulse2Config pulse2;
  GridConfig grid;
  ChannelModel channel;
  RegimeThresholds regime;
  OutputConfig outputs;
  /// Non-fatal notes raised while parsing (e.g. renormalized initial state).
  std::vector<std::string> warnings;

  TimeGrid make_grid() const;
  PulseShape make_pulse1() const;

  /// Fully resolved configuration, every field present, in external units.
  nlohmann::json to_json() const;
  /// FNV-1a 64-bit hash of to_json().dump(), as 16 hex digits.
  std::string hash() const;
};

/// Parses a JSON document. Missing sections and fields take the defaults above;
/// unknown fields are rejected.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

struct SendResult {
  DerivedQuantities derived;
  RegimeReport regime;
  PulseShape pulse1;
  SenderTrajectory sender;
  PhotonObservables photons;
};

SendResult run_send(const ScenarioConfig& config);

struct TransferResult {
  SendResult send;
  PulseSolveResult pulse2;  ///< solved (or best-found) or explicit pulse
  bool solved = false;      ///< pulse2 came from the solver
  bool solve_converged = true;
  ReceiverTrajectory receiver;
  /// max |analytic − ODE| over all γ amplitudes; NaN when φ₂ ≠ π/2.
  double receiver_oracle_deviation;
  FinalStateResult final_state;
  ChannelBudget channel;
  double end_to_end_success;
};

/// send → (solve) → receive → channel. A solver failure does not throw: the
/// best-found pulse is used and `solve_converged` is false.
TransferResult run_transfer(const ScenarioConfig& config);

nlohmann::json regime_to_json(const RegimeReport& report);
nlohmann::json transfer_report(const ScenarioConfig& config, const TransferResult& result);

void write_sender_csv(const std::string& path, const ScenarioConfig& config, const SendResult& r);
void write_photonics_csv(const std::string& path, const ScenarioConfig& config,
                         const SendResult& r);
void write_receiver_csv(const std::string& path, const ScenarioConfig& config,
                        const TransferResult& r);

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Evaluates one point per value of `axis` (dotted path to a numeric config
/// field, or "initial_state.pop_m1" for a real qubit with |c₋₁|² = value).
/// Axes under "channel." only re-evaluate the link budget. Rows are ordered
/// by sample index whatever the thread count.
SweepTable run_sweep(const ScenarioConfig& base, const std::string& axis, double from, double to,
                     std::size_t points, unsigned threads = 0);

void write_sweep_csv(const std::string& path, const ScenarioConfig& config, const SweepTable& t);

}  // namespace pnss
