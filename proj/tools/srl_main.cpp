// srl: steady states, spectra and parameter maps of an incoherently pumped
// superradiant laser, from the four-moment mean-field equations with a
// small-N Dicke-basis master-equation cross-check.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "srl/dicke.hpp"
#include "srl/io.hpp"
#include "srl/model.hpp"
#include "srl/presets.hpp"
#include "srl/sweep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace srl;

namespace {

struct RateInput {
    double hz = 0.0;
    double angular = 0.0;
    CLI::Option* opt_hz = nullptr;
    CLI::Option* opt_angular = nullptr;

    double resolved() const {
        if (opt_angular && opt_angular->count() > 0) return angular;
        return hz_to_angular(hz);
    }
};

struct ParamInputs {
    RateInput gamma, kappa, g, chi, eta, delta;
    double n_atoms = 0.0;

    void add_options(CLI::App& app) {
        auto add = [&app](RateInput& r, const std::string& name, const std::string& desc) {
            r.opt_hz = app.add_option("--" + name, r.hz, desc + " (ordinary Hz)");
            r.opt_angular = app.add_option("--" + name + "-angular,--" + name + "_angular",
                                           r.angular, desc + " (rad/s, overrides --" + name + ")");
        };
        add(gamma, "gamma", "atomic population decay rate");
        add(kappa, "kappa", "cavity loss rate");
        add(g, "g", "single atom-photon coupling");
        add(chi, "chi", "inhomogeneous dephasing rate 1/T2*");
        add(eta, "eta", "incoherent pump rate");
        add(delta, "delta", "cavity-atom detuning");
        app.add_option("--n-atoms,--n_atoms", n_atoms, "atom number N");
    }

    PhysicalParams resolve() const {
        return PhysicalParams::angular(gamma.resolved(), kappa.resolved(), g.resolved(),
                                       chi.resolved(), eta.resolved(), delta.resolved(),
                                       n_atoms);
    }

    json to_json() const { return io::params_to_json(resolve()); }
};

struct MaterialInputs {
    MaterialParams mat;
    double lambda_nm = 0.0;
    CLI::Option* density_opt = nullptr;
    CLI::Option* lambda_opt = nullptr;

    void add_options(CLI::App& app) {
        density_opt = app.add_option("--material_host_ion_density", mat.host_ion_density,
                                     "host ion density (per um^3)");
        app.add_option("--material_doping_fraction", mat.doping_fraction, "doping fraction");
        app.add_option("--material_gamma_h_hz", mat.gamma_h_hz, "homogeneous linewidth (Hz)");
        app.add_option("--material_gamma_inh_hz", mat.gamma_inh_hz,
                       "inhomogeneous linewidth (Hz)");
        app.add_option("--material_excitation_volume", mat.excitation_volume,
                       "excitation volume (um^3)");
        app.add_option("--material_t1_s", [this](const auto& vals) {
            mat.t1_s = std::stod(vals[0]);
            return true;
        }, "population lifetime T1 (s)");
        app.add_option("--material_t2_s", [this](const auto& vals) {
            mat.t2_s = std::stod(vals[0]);
            return true;
        }, "coherence time T2 (s)");
        app.add_option("--material_dipole_moment_cm", [this](const auto& vals) {
            mat.dipole_moment_cm = std::stod(vals[0]);
            return true;
        }, "transition dipole moment (C m)");
        lambda_opt = app.add_option("--material_lambda_nm", lambda_nm,
                                    "transition wavelength (nm)");
    }

    bool present() const { return density_opt && density_opt->count() > 0; }
};

struct CavityInputs {
    double length_m = 0.0, r1 = 1.0, r2 = 1.0;
    CLI::Option* length_opt = nullptr;

    void add_options(CLI::App& app) {
        length_opt = app.add_option("--cavity_length_m", length_m, "cavity length (m)");
        app.add_option("--cavity_r1", r1, "mirror 1 power reflectivity");
        app.add_option("--cavity_r2", r2, "mirror 2 power reflectivity");
    }
    bool present() const { return length_opt && length_opt->count() > 0; }
};

unsigned resolve_workers(unsigned cli_value) {
    if (const char* env = std::getenv("SRL_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return cli_value;
}

json config_echo(const CLI::App& app, const ParamInputs& params) {
    json cfg;
    cfg["command"] = app.get_subcommands().empty()
                         ? "(none)"
                         : app.get_subcommands().front()->get_name();
    cfg["params"] = params.to_json();
    return cfg;
}

std::vector<double> parse_scan(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"superradiant laser simulator: mean-field steady states, quantum-"
                 "regression spectra, parameter sweeps and a Dicke master-equation oracle"};
    app.fallthrough();
    argv = app.ensure_utf8(argv);

    const fs::path exe_dir = fs::weakly_canonical(fs::path(argv[0])).parent_path();

    app.set_config("--config,--preset", "",
                   "configuration file (TOML) or shipped preset name")
        ->transform([exe_dir](const std::string& name) {
            return presets::resolve(name, exe_dir).string();
        });
    app.allow_config_extras(CLI::config_extras_mode::error);

    ParamInputs params;
    params.add_options(app);
    MaterialInputs material;
    material.add_options(app);
    CavityInputs cavity;
    cavity.add_options(app);

    std::string out_dir = ".";
    bool dry_run = false;
    unsigned workers = 0;
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--dry-run", dry_run, "validate configuration and print the plan only");
    app.add_option("--workers", workers,
                   "worker threads (0 = hardware concurrency; SRL_WORKERS overrides)");

    // ---- derive ----------------------------------------------------------
    auto* cmd_derive = app.add_subcommand("derive", "closed-form derived quantities");
    double nu_hz = 0.0, p_out = 0.0, n_excited = 1.0, n_ground = 0.0;
    auto* nu_opt = cmd_derive->add_option("--nu-hz", nu_hz, "optical frequency (Hz)");
    auto* pout_opt =
        cmd_derive->add_option("--p-out", p_out, "laser output power (W), enables the "
                                                 "power-form linewidths");
    cmd_derive->add_option("--n-excited", n_excited, "excited population");
    cmd_derive->add_option("--n-ground", n_ground, "ground population");

    // ---- dynamics --------------------------------------------------------
    auto* cmd_dynamics = app.add_subcommand("dynamics", "moment-equation time evolution");
    double t_end = 1e-4, dyn_rtol = 1e-8;
    std::size_t n_samples = 500;
    std::string eta_scan;
    double init_inversion = 0.0, init_photon = 0.0;
    cmd_dynamics->add_option("--t-end", t_end, "evolution horizon (s)");
    cmd_dynamics->add_option("--samples", n_samples, "output samples");
    cmd_dynamics->add_option("--rtol", dyn_rtol, "integrator relative tolerance");
    cmd_dynamics->add_option("--eta-scan", eta_scan,
                             "comma-separated pump rates (Hz) to scan");
    cmd_dynamics->add_option("--init-inversion", init_inversion, "initial sigma_z");
    cmd_dynamics->add_option("--init-photon", init_photon, "initial photon number");

    // ---- steady ----------------------------------------------------------
    auto* cmd_steady = app.add_subcommand("steady", "moment-equation steady state");
    std::string method = "rootfind";
    cmd_steady->add_option("--method", method, "rootfind | relaxation")
        ->check(CLI::IsMember({"rootfind", "relaxation"}));

    // ---- spectrum --------------------------------------------------------
    auto* cmd_spectrum =
        app.add_subcommand("spectrum", "emission spectrum and fitted linewidth");
    std::size_t budget = 1 << 18;
    int pad_factor = 8;
    bool faithful = false, svg = false;
    cmd_spectrum->add_option("--budget", budget, "correlation sample budget");
    cmd_spectrum->add_option("--pad", pad_factor, "zero-padding factor");
    cmd_spectrum->add_flag("--faithful-fig3", faithful,
                           "literal 100 MHz x 1 s sampling grid (1e8 samples)");
    cmd_spectrum->add_flag("--svg", svg, "write an SVG plot of spectrum and fit");

    // ---- sweep -----------------------------------------------------------
    auto* cmd_sweep = app.add_subcommand("sweep", "(N, eta) parameter maps");
    sweep::GridSpec grid_spec;
    grid_spec.n_axis = {60, 1e6, 1e12, true};
    grid_spec.eta_axis = {60, 1e3, 1e9, true};
    std::string quantity = "both";
    double timeout_s = 30.0;
    std::size_t max_cells = 100'000;
    std::size_t lw_samples = 1 << 14;
    std::string checkpoint;
    bool sweep_svg = false, linear_axes = false;
    cmd_sweep->add_option("--n-min", grid_spec.n_axis.min_value, "atom-number axis minimum");
    cmd_sweep->add_option("--n-max", grid_spec.n_axis.max_value, "atom-number axis maximum");
    cmd_sweep->add_option("--n-count", grid_spec.n_axis.count, "atom-number axis points");
    cmd_sweep->add_option("--eta-min", grid_spec.eta_axis.min_value, "pump axis minimum (Hz)");
    cmd_sweep->add_option("--eta-max", grid_spec.eta_axis.max_value, "pump axis maximum (Hz)");
    cmd_sweep->add_option("--eta-count", grid_spec.eta_axis.count, "pump axis points");
    cmd_sweep->add_flag("--linear-axes", linear_axes, "linear instead of log spacing");
    cmd_sweep->add_option("--quantity", quantity, "photon | linewidth | both")
        ->check(CLI::IsMember({"photon", "linewidth", "both"}));
    cmd_sweep->add_option("--timeout", timeout_s, "per-cell wall timeout (s)");
    cmd_sweep->add_option("--max-cells", max_cells, "cell budget");
    cmd_sweep->add_option("--lw-samples", lw_samples, "correlation samples per cell");
    cmd_sweep->add_option("--checkpoint", checkpoint,
                          "JSONL checkpoint; interrupted sweeps resume from it");
    cmd_sweep->add_flag("--svg", sweep_svg, "write heatmap SVGs");

    // ---- oracle ----------------------------------------------------------
    auto* cmd_oracle =
        app.add_subcommand("oracle", "Dicke-basis master-equation steady states");
    int n_tls = 4, n_fock = 12;
    std::string oracle_eta_scan;
    double gamma_collective = 0.0;
    cmd_oracle->add_option("--n-tls", n_tls, "number of two-level systems");
    cmd_oracle->add_option("--n-fock", n_fock, "Fock-space truncation");
    cmd_oracle->add_option("--eta-scan", oracle_eta_scan,
                           "comma-separated pump rates (Hz); default: the configured eta");
    cmd_oracle->add_option("--gamma-collective", gamma_collective,
                           "collective emission rate (Hz)");

    // ---- compare ---------------------------------------------------------
    auto* cmd_compare =
        app.add_subcommand("compare", "mean-field vs master-equation photon numbers");
    std::string n_list_csv = "4,6,8", compare_eta_scan;
    int compare_fock = 12;
    std::size_t eta_count = 8;
    double eta_lo_mult = 1.0, eta_hi_mult = 0.0;
    cmd_compare->add_option("--n-list", n_list_csv, "comma-separated atom numbers");
    cmd_compare->add_option("--eta-scan", compare_eta_scan,
                            "comma-separated pump rates (Hz); overrides the span options");
    cmd_compare->add_option("--eta-count", eta_count, "points of the log-spaced pump span");
    cmd_compare->add_option("--eta-lo-mult", eta_lo_mult, "span start as a multiple of gamma");
    cmd_compare->add_option("--eta-hi-mult", eta_hi_mult,
                            "span end as a multiple of kappa (0: 10x kappa)");
    cmd_compare->add_option("--n-fock", compare_fock, "Fock-space truncation");

    app.require_subcommand(0, 1);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 2;
        }

        if (app.get_subcommands().empty()) {
            std::cout << app.help() << std::endl;
            return 0;
        }
        const fs::path out{out_dir};
        workers = resolve_workers(workers);
        json cfg = config_echo(app, params);

        if (dry_run) {
            cfg["dry_run"] = true;
            std::cout << cfg.dump(2) << "\n";
            return 0;
        }

        if (cmd_derive->parsed()) {
            const auto p = params.resolve();
            const auto d = derive(p);
            json data;
            data["c1"] = d.c1;
            data["n_c"] = d.n_c;
            data["m_c"] = d.m_c;
            data["n_crit"] = d.n_crit;
            data["n_g"] = d.n_g;
            data["pulling"] = d.pulling;
            data["nc1gamma_rad_s"] = d.nc1gamma;
            data["linewidth_cooperativity_hz"] = linewidth_cooperativity(d.c1, p.gamma);
            if (std::isfinite(d.m_c)) {
                data["linewidth_bad_cavity_photon_hz"] =
                    linewidth_bad_cavity_photon(p.gamma, p.kappa, d.m_c);
            }
            double nu = nu_opt->count() ? nu_hz : 0.0;
            if (nu == 0.0 && material.lambda_opt->count() > 0) {
                nu = speed_of_light / (material.lambda_nm * 1e-9);
            }
            if (pout_opt->count() > 0 && nu > 0.0) {
                data["nu_hz"] = nu;
                data["linewidth_schawlow_townes_hz"] =
                    linewidth_schawlow_townes(nu, p.kappa, p_out);
                data["linewidth_bad_cavity_haken_hz"] = linewidth_bad_cavity_haken(
                    nu, nu, p.kappa, p.gamma, p_out, n_excited, n_ground);
            }
            if (material.present()) {
                data["ion_number_estimate"] = ion_number_estimate(material.mat);
            }
            if (cavity.present()) {
                data["cold_cavity_loss_rad_s"] = cold_cavity_loss(
                    CavityGeometry::make(cavity.length_m, cavity.r1, cavity.r2));
            }
            std::cout << "derived quantities\n";
            for (const auto& [key, val] : data.items()) {
                std::cout << "  " << key << " = " << val.dump() << "\n";
            }
            io::write_text(out / "derive.json", io::finalize_json(cfg, data));
            return 0;
        }

        if (cmd_dynamics->parsed()) {
            const auto base = params.resolve();
            std::vector<double> etas = eta_scan.empty()
                                           ? std::vector<double>{angular_to_hz(base.eta)}
                                           : parse_scan(eta_scan);
            json report = json::array();
            for (double eta_hz : etas) {
                PhysicalParams p = base;
                p.eta = hz_to_angular(eta_hz);
                MeanFieldState init;
                init.inversion = init_inversion;
                init.n_photon = init_photon;
                EvolveOptions opt;
                opt.rtol = dyn_rtol;
                opt.n_samples = n_samples;
                const auto traj = evolve(init, p, t_end, opt);
                json cfg_eta = cfg;
                cfg_eta["params"]["eta_hz"] = eta_hz;
                std::ostringstream tag;
                tag << "dynamics_eta_" << io::format_double(eta_hz);
                io::write_text(out / (tag.str() + ".csv"),
                               io::trajectory_csv(traj, cfg_eta));
                io::write_text(out / (tag.str() + ".json"),
                               io::finalize_json(cfg_eta, io::trajectory_json_data(traj)));
                // time-to-plateau: first time the inversion stays within 5% of
                // the tail mean of the trajectory
                double tail = 0.0;
                const std::size_t half = traj.states.size() / 2;
                for (std::size_t k = half; k < traj.states.size(); ++k) {
                    tail += traj.states[k].inversion;
                }
                tail /= static_cast<double>(traj.states.size() - half);
                double t_plateau = traj.times.back();
                const double band = 0.05 * std::max(std::abs(tail), 1e-3);
                for (std::size_t k = 0; k < traj.states.size(); ++k) {
                    if (std::abs(traj.states[k].inversion - tail) < band) {
                        t_plateau = traj.times[k];
                        break;
                    }
                }
                report.push_back({{"eta_hz", eta_hz},
                                  {"sigma_z_tail_mean", tail},
                                  {"time_to_plateau_s", t_plateau},
                                  {"final_n_photon", traj.states.back().n_photon}});
                std::cout << "eta = " << eta_hz << " Hz: plateau after " << t_plateau
                          << " s, tail sigma_z = " << tail << "\n";
            }
            io::write_text(out / "dynamics_report.json", io::finalize_json(cfg, report));
            return 0;
        }

        if (cmd_steady->parsed()) {
            const auto p = params.resolve();
            const auto m =
                method == "rootfind" ? SteadyMethod::rootfind : SteadyMethod::relaxation;
            const auto s = steady_state(p, m);
            json data{{"method", method},
                      {"n_photon", s.n_photon},
                      {"sigma_z", s.inversion},
                      {"coherence_re", s.coherence.real()},
                      {"coherence_im", s.coherence.imag()},
                      {"spin_corr_re", s.spin_corr.real()},
                      {"spin_corr_im", s.spin_corr.imag()},
                      {"residual", steady_residual(s, p)}};
            std::cout << "steady state (" << method << "): n_photon = " << s.n_photon
                      << ", sigma_z = " << s.inversion << "\n";
            io::write_text(out / "steady.json", io::finalize_json(cfg, data));
            return 0;
        }

        if (cmd_spectrum->parsed()) {
            const auto p = params.resolve();
            LinewidthOptions opt;
            opt.max_samples = budget;
            opt.pad_factor = pad_factor;
            opt.faithful_fig3 = faithful;
            opt.keep_spectrum = true;
            const auto res = linewidth(p, opt);
            std::cout << "fitted FWHM = " << res.fwhm_hz << " Hz (center offset "
                      << res.fit.center_hz << " Hz, residual " << res.fit.rms_residual_rel
                      << ")\n";
            io::write_text(out / "spectrum.csv", io::spectrum_csv(*res.spectrum, cfg));
            io::write_text(out / "linewidth.json",
                           io::finalize_json(cfg, io::linewidth_json_data(res, false)));
            if (svg) {
                io::write_text(out / "spectrum.svg", io::spectrum_svg(*res.spectrum, res.fit));
            }
            return 0;
        }

        if (cmd_sweep->parsed()) {
            const auto base = params.resolve();
            if (linear_axes) {
                grid_spec.n_axis.log_spaced = false;
                grid_spec.eta_axis.log_spaced = false;
            }
            sweep::SweepOptions opt;
            opt.workers = workers;
            opt.cell_timeout_s = timeout_s;
            opt.max_cells = max_cells;
            opt.linewidth_samples = lw_samples;
            if (!checkpoint.empty()) opt.checkpoint = fs::path(checkpoint);
            const auto over = sweep::overlays(base, grid_spec.n_axis);
            auto emit = [&](const sweep::SweepGrid& grid, const std::string& name) {
                io::write_text(out / (name + ".csv"), sweep::matrix_csv(grid, cfg));
                io::write_text(out / (name + "_status.csv"), sweep::status_csv(grid, cfg));
                io::write_text(out / (name + "_manifest.json"),
                               io::finalize_json(cfg, sweep::manifest_data(grid, over)));
                if (sweep_svg) {
                    io::write_text(out / (name + ".svg"), sweep::heatmap_svg(grid, over));
                }
                const auto c = grid.count_statuses();
                std::cout << name << ": ok " << c.ok << ", no-convergence "
                          << c.no_convergence << ", fit-failed " << c.fit_failed
                          << ", fit-skipped " << c.fit_skipped << "\n";
            };
            if (quantity == "photon" || quantity == "both") {
                if (opt.checkpoint) opt.checkpoint = fs::path(checkpoint + ".photon");
                emit(sweep::sweep_photon(grid_spec, base, opt), "photon");
            }
            if (quantity == "linewidth" || quantity == "both") {
                if (!checkpoint.empty()) opt.checkpoint = fs::path(checkpoint + ".linewidth");
                emit(sweep::sweep_linewidth(grid_spec, base, opt), "linewidth");
            }
            return 0;
        }

        if (cmd_oracle->parsed()) {
            const auto base = params.resolve();
            std::vector<double> etas = oracle_eta_scan.empty()
                                           ? std::vector<double>{angular_to_hz(base.eta)}
                                           : parse_scan(oracle_eta_scan);
            const auto space = dicke::DickeSpace::make(n_tls);
            std::ostringstream body;
            body << "eta_hz,n_photon,jz_per_atom\n";
            json rows = json::array();
            for (double eta_hz : etas) {
                dicke::OracleParams op;
                op.gamma_local_down = base.gamma;
                op.gamma_local_up = hz_to_angular(eta_hz);
                op.gamma_local_phase = 2.0 * base.chi;
                op.gamma_collective = hz_to_angular(gamma_collective);
                op.cavity = {base.g, base.kappa, base.delta, n_fock};
                const dicke::Liouvillian liou(op, space);
                dicke::SteadyStateInfo info;
                const auto rho = dicke::me_steady_state(liou, &info);
                const double nph = rho.photon_number();
                const double jz = rho.jz() / n_tls;
                body << io::format_double(eta_hz) << ',' << io::format_double(nph) << ','
                     << io::format_double(jz) << "\n";
                rows.push_back({{"eta_hz", eta_hz},
                                {"n_photon", nph},
                                {"jz_per_atom", jz},
                                {"residual", info.residual},
                                {"used_propagation", info.used_propagation}});
                std::cout << "eta = " << eta_hz << " Hz: <a^dag a> = " << nph
                          << ", <J_z>/N = " << jz << "\n";
                if (!info.warning.empty()) std::cout << "  warning: " << info.warning << "\n";
            }
            json cfg_o = cfg;
            cfg_o["n_tls"] = n_tls;
            cfg_o["n_fock"] = n_fock;
            io::write_text(out / "oracle.csv", io::finalize_csv(cfg_o, body.str()));
            io::write_text(out / "oracle.json", io::finalize_json(cfg_o, rows));
            return 0;
        }

        if (cmd_compare->parsed()) {
            const auto base = params.resolve();
            std::vector<double> n_list;
            for (double v : parse_scan(n_list_csv)) n_list.push_back(v);
            std::vector<double> etas;
            if (!compare_eta_scan.empty()) {
                for (double v : parse_scan(compare_eta_scan)) etas.push_back(hz_to_angular(v));
            } else {
                const double lo = eta_lo_mult * base.gamma;
                const double hi = (eta_hi_mult > 0.0 ? eta_hi_mult : 10.0) * base.kappa;
                for (std::size_t k = 0; k < eta_count; ++k) {
                    const double f = eta_count == 1
                                         ? 0.0
                                         : static_cast<double>(k) /
                                               static_cast<double>(eta_count - 1);
                    etas.push_back(std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
                }
            }
            dicke::CompareOptions copt;
            copt.n_fock = compare_fock;
            copt.workers = workers;
            const auto table = dicke::compare_mft_me(base, n_list, etas, copt);
            std::ostringstream body;
            body << "n_atoms,eta_hz,n_mft,n_me,ratio,flag\n";
            json rows = json::array();
            std::size_t flagged = 0;
            for (const auto& row : table.rows) {
                body << io::format_double(row.n_atoms) << ','
                     << io::format_double(angular_to_hz(row.eta)) << ','
                     << io::format_double(row.n_mft) << ',' << io::format_double(row.n_me)
                     << ',' << io::format_double(row.ratio) << ','
                     << (row.flagged ? "1" : "0") << "\n";
                rows.push_back({{"n_atoms", row.n_atoms},
                                {"eta_hz", angular_to_hz(row.eta)},
                                {"n_mft", row.n_mft},
                                {"n_me", row.n_me},
                                {"ratio", row.ratio},
                                {"flagged", row.flagged}});
                flagged += row.flagged;
            }
            json cfg_c = cfg;
            cfg_c["n_fock"] = compare_fock;
            io::write_text(out / "compare.csv", io::finalize_csv(cfg_c, body.str()));
            io::write_text(out / "compare.json", io::finalize_json(cfg_c, rows));
            std::cout << "compared " << table.rows.size() << " cells; " << flagged
                      << " outside the factor-2 band\n";
            return 0;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
