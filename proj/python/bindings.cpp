#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srl/dicke.hpp"
#include "srl/model.hpp"
#include "srl/spectrum.hpp"
#include "srl/sweep.hpp"

namespace py = pybind11;
using namespace srl;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<std::complex<double>> to_array(const std::vector<std::complex<double>>& v) {
    return py::array_t<std::complex<double>>(static_cast<py::ssize_t>(v.size()), v.data());
}

}  // namespace

PYBIND11_MODULE(_srlsim, m) {
    m.doc() = "superradiant laser simulator: mean-field steady states, quantum-regression "
              "spectra, parameter sweeps and a Dicke-basis master-equation oracle";

    py::register_exception<ConfigError>(m, "SrlConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "SrlNumericalError", PyExc_RuntimeError);
    py::register_exception<BudgetError>(m, "SrlBudgetError", PyExc_MemoryError);

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def_static("angular", &PhysicalParams::angular, py::arg("gamma"), py::arg("kappa"),
                    py::arg("g"), py::arg("chi"), py::arg("eta"), py::arg("delta"),
                    py::arg("n_atoms"))
        .def_static("from_ordinary_hz", &PhysicalParams::from_ordinary_hz, py::arg("gamma"),
                    py::arg("kappa"), py::arg("g"), py::arg("chi"), py::arg("eta"),
                    py::arg("delta"), py::arg("n_atoms"))
        .def_readonly("gamma", &PhysicalParams::gamma)
        .def_readonly("kappa", &PhysicalParams::kappa)
        .def_readonly("g", &PhysicalParams::g)
        .def_readonly("chi", &PhysicalParams::chi)
        .def_readonly("eta", &PhysicalParams::eta)
        .def_readonly("delta", &PhysicalParams::delta)
        .def_readonly("n_atoms", &PhysicalParams::n_atoms)
        .def("__repr__", [](const PhysicalParams& p) {
            return "PhysicalParams(gamma=" + std::to_string(p.gamma) +
                   " rad/s, kappa=" + std::to_string(p.kappa) + " rad/s, N=" +
                   std::to_string(p.n_atoms) + ")";
        });

    py::class_<DerivedQuantities>(m, "DerivedQuantities")
        .def_readonly("c1", &DerivedQuantities::c1)
        .def_readonly("n_c", &DerivedQuantities::n_c)
        .def_readonly("m_c", &DerivedQuantities::m_c)
        .def_readonly("n_crit", &DerivedQuantities::n_crit)
        .def_readonly("n_g", &DerivedQuantities::n_g)
        .def_readonly("pulling", &DerivedQuantities::pulling)
        .def_readonly("nc1gamma", &DerivedQuantities::nc1gamma);

    m.def("derive", &derive, py::arg("params"));
    m.def("group_index", &group_index, py::arg("gamma"), py::arg("kappa"));
    m.def("linewidth_schawlow_townes", &linewidth_schawlow_townes, py::arg("nu_hz"),
          py::arg("kappa"), py::arg("p_out_w"));
    m.def("linewidth_bad_cavity_haken", &linewidth_bad_cavity_haken, py::arg("nu_hz"),
          py::arg("nu0_hz"), py::arg("kappa"), py::arg("gamma"), py::arg("p_out_w"),
          py::arg("n_excited"), py::arg("n_ground"));
    m.def("linewidth_bad_cavity_photon", &linewidth_bad_cavity_photon, py::arg("gamma"),
          py::arg("kappa"), py::arg("m_c"));
    m.def("linewidth_cooperativity", &linewidth_cooperativity, py::arg("c1"),
          py::arg("gamma"));
    m.def(
        "cold_cavity_loss",
        [](double length_m, double r1, double r2) {
            return cold_cavity_loss(CavityGeometry::make(length_m, r1, r2));
        },
        py::arg("length_m"), py::arg("r1"), py::arg("r2"));

    py::class_<MeanFieldState>(m, "MeanFieldState")
        .def(py::init<>())
        .def_readwrite("n_photon", &MeanFieldState::n_photon)
        .def_readwrite("coherence", &MeanFieldState::coherence)
        .def_readwrite("inversion", &MeanFieldState::inversion)
        .def_readwrite("spin_corr", &MeanFieldState::spin_corr);

    m.def(
        "steady_state",
        [](const PhysicalParams& p, const std::string& method) {
            return steady_state(p, method == "relaxation" ? SteadyMethod::relaxation
                                                          : SteadyMethod::rootfind);
        },
        py::arg("params"), py::arg("method") = "rootfind",
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "evolve",
        [](const MeanFieldState& init, const PhysicalParams& p, double t_end, double rtol,
           std::size_t n_samples) {
            EvolveOptions opt;
            opt.rtol = rtol;
            opt.n_samples = n_samples;
            Trajectory traj;
            {
                py::gil_scoped_release release;
                traj = evolve(init, p, t_end, opt);
            }
            std::vector<double> n, sz;
            std::vector<std::complex<double>> coh, corr;
            for (const auto& s : traj.states) {
                n.push_back(s.n_photon);
                sz.push_back(s.inversion);
                coh.push_back(s.coherence);
                corr.push_back(s.spin_corr);
            }
            py::dict out;
            out["times"] = to_array(traj.times);
            out["n_photon"] = to_array(n);
            out["sigma_z"] = to_array(sz);
            out["coherence"] = to_array(coh);
            out["spin_corr"] = to_array(corr);
            return out;
        },
        py::arg("initial"), py::arg("params"), py::arg("t_end"), py::arg("rtol") = 1e-8,
        py::arg("n_samples") = 200);

    m.def(
        "linewidth",
        [](const PhysicalParams& p, std::size_t max_samples, int pad_factor,
           bool keep_spectrum) {
            LinewidthOptions opt;
            opt.max_samples = max_samples;
            opt.pad_factor = pad_factor;
            opt.keep_spectrum = keep_spectrum;
            LinewidthResult res;
            {
                py::gil_scoped_release release;
                res = linewidth(p, opt);
            }
            py::dict out;
            out["fwhm_hz"] = res.fwhm_hz;
            out["center_hz"] = res.fit.center_hz;
            out["rms_residual_rel"] = res.fit.rms_residual_rel;
            out["lambda_slow"] = res.modes.lambda_slow;
            out["lambda_fast"] = res.modes.lambda_fast;
            out["n_photon_ss"] = res.steady.n_photon;
            out["sigma_z_ss"] = res.steady.inversion;
            if (keep_spectrum && res.spectrum) {
                out["freqs_hz"] = to_array(res.spectrum->freqs_hz);
                out["psd"] = to_array(res.spectrum->psd);
            }
            return out;
        },
        py::arg("params"), py::arg("max_samples") = (1 << 16), py::arg("pad_factor") = 8,
        py::arg("keep_spectrum") = false);

    m.def(
        "me_steady_photon",
        [](int n_tls, int n_fock, const PhysicalParams& p) {
            dicke::OracleParams op;
            op.gamma_local_down = p.gamma;
            op.gamma_local_up = p.eta;
            op.gamma_local_phase = 2.0 * p.chi;
            op.cavity = {p.g, p.kappa, p.delta, n_fock};
            double out = 0.0;
            {
                py::gil_scoped_release release;
                const auto space = dicke::DickeSpace::make(n_tls);
                const dicke::Liouvillian liou(op, space);
                out = dicke::me_steady_state(liou).photon_number();
            }
            return out;
        },
        py::arg("n_tls"), py::arg("n_fock"), py::arg("params"),
        "master-equation steady photon number with the same parameter mapping as the "
        "comparison table (local pump eta, local dephasing 2 chi)");

    m.def(
        "sweep_photon",
        [](const PhysicalParams& base, std::size_t n_count, double n_min, double n_max,
           std::size_t eta_count, double eta_min_hz, double eta_max_hz, unsigned workers) {
            sweep::GridSpec spec;
            spec.n_axis = {n_count, n_min, n_max, true};
            spec.eta_axis = {eta_count, eta_min_hz, eta_max_hz, true};
            sweep::SweepOptions opt;
            opt.workers = workers;
            sweep::SweepGrid grid = [&] {
                py::gil_scoped_release release;
                return sweep::sweep_photon(spec, base, opt);
            }();
            py::array_t<double> values({n_count, eta_count});
            auto v = values.mutable_unchecked<2>();
            for (std::size_t i = 0; i < n_count; ++i) {
                for (std::size_t j = 0; j < eta_count; ++j) {
                    v(i, j) = grid.at(i, j).n_photon;
                }
            }
            py::dict out;
            out["n_values"] = to_array(grid.n_values);
            out["eta_values_hz"] = to_array(grid.eta_values_hz);
            out["n_photon"] = values;
            return out;
        },
        py::arg("base"), py::arg("n_count"), py::arg("n_min"), py::arg("n_max"),
        py::arg("eta_count"), py::arg("eta_min_hz"), py::arg("eta_max_hz"),
        py::arg("workers") = 0);

    m.attr("__version__") = "0.1.0";
}
