#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pnss/scenario.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<std::complex<double>> to_array(const std::vector<pnss::cplx>& v) {
  py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::object from_json(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict send_dict(const pnss::SendResult& r) {
  const auto& s = r.sender;
  const auto& ph = r.photons;
  py::dict d;
  d["t"] = to_array(s.grid.values());
  d["theta"] = to_array(s.theta.values);
  d["sigma_m1"] = to_array(s.populations.sigma_m1);
  d["sigma_0"] = to_array(s.populations.sigma_0);
  d["sigma_p1"] = to_array(s.populations.sigma_p1);
  d["coh_m1_0"] = to_array(s.populations.coh_m1_0);
  d["coh_0_p1"] = to_array(s.populations.coh_0_p1);
  d["coh_m1_p1"] = to_array(s.populations.coh_m1_p1);
  d["P0"] = to_array(ph.distribution.P0);
  d["P1"] = to_array(ph.distribution.P1);
  d["P2"] = to_array(ph.distribution.P2);
  d["flux_total"] = to_array(ph.fluxes.flux_total);
  d["flux_I"] = to_array(ph.fluxes.flux_I);
  d["flux_II"] = to_array(ph.fluxes.flux_II);
  d["Phi1"] = to_array(ph.fluxes.Phi1);
  d["Phi2"] = to_array(ph.fluxes.Phi2);
  d["n_out"] = to_array(ph.n_out.values);
  d["g2"] = to_array(ph.g2.g2);
  d["mode_overlap"] = ph.overlap;
  d["G1"] = r.derived.G1;
  d["alpha1"] = r.derived.alpha1;
  d["R_sn"] = r.derived.R_sn;
  d["regime"] = from_json(pnss::regime_to_json(r.regime));
  return d;
}

}  // namespace

PYBIND11_MODULE(_pnss, m) {
  m.doc() = "Photon-number superposition transfer between two cavity-QED nodes";

  py::register_exception<pnss::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<pnss::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<pnss::NumericsError>(m, "NumericsError", PyExc_RuntimeError);

  m.def("resolve_config", [](const std::string& text) { return from_json(pnss::parse_config(text).to_json()); },
        py::arg("config_json"));

  m.def("config_hash", [](const std::string& text) { return pnss::parse_config(text).hash(); },
        py::arg("config_json"));

  m.def(
      "send",
      [](const std::string& text) {
        const auto cfg = pnss::parse_config(text);
        pnss::SendResult r = [&] {
          py::gil_scoped_release nogil;
          return pnss::run_send(cfg);
        }();
        return send_dict(r);
      },
      py::arg("config_json"));

  m.def(
      "transfer",
      [](const std::string& text) {
        const auto cfg = pnss::parse_config(text);
        pnss::TransferResult r = [&] {
          py::gil_scoped_release nogil;
          return pnss::run_transfer(cfg);
        }();
        py::dict d = send_dict(r.send);
        const auto& rx = r.receiver;
        d["eta"] = to_array(rx.eta);
        d["zeta"] = to_array(rx.zeta);
        d["rho_m1"] = to_array(rx.rho_m1);
        d["rho_0"] = to_array(rx.rho_0);
        d["rho_p1"] = to_array(rx.rho_p1);
        d["conservation_residual"] = to_array(rx.conservation_residual);
        d["report"] = from_json(pnss::transfer_report(cfg, r));
        return d;
      },
      py::arg("config_json"));

  m.def(
      "sweep",
      [](const std::string& text, const std::string& axis, double from, double to,
         std::size_t points, unsigned threads) {
        const auto cfg = pnss::parse_config(text);
        pnss::SweepTable t = [&] {
          py::gil_scoped_release nogil;
          return pnss::run_sweep(cfg, axis, from, to, points, threads);
        }();
        py::array_t<double> table({t.rows.size(), t.columns.size()});
        auto view = table.mutable_unchecked<2>();
        for (std::size_t i = 0; i < t.rows.size(); ++i)
          for (std::size_t j = 0; j < t.columns.size(); ++j) view(i, j) = t.rows[i][j];
        return py::make_tuple(t.columns, table);
      },
      py::arg("config_json"), py::arg("axis"), py::arg("start"), py::arg("stop"),
      py::arg("points"), py::arg("threads") = 0);

  m.def("attenuation_length", &pnss::attenuation_length, py::arg("db_per_km"));
  m.def("transmission_efficiency", &pnss::transmission_efficiency, py::arg("L0_km"),
        py::arg("L_att_km"), py::arg("photons"));
  m.def("mhz_to_rad_per_s", &pnss::mhz_to_rad_per_s, py::arg("mhz"));
}
