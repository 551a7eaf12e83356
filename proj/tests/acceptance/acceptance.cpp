// Acceptance suite: one numbered, independently runnable check per claim the
// project makes about itself. Prints one PASS/FAIL line per criterion.
//
//   acceptance            runs everything
//   acceptance 3 5 8      runs a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "srl/dicke.hpp"
#include "srl/io.hpp"
#include "srl/model.hpp"
#include "srl/spectrum.hpp"
#include "srl/sweep.hpp"
#include "support/bruteforce.hpp"
#include "support/oracles.hpp"

using namespace srl;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

PhysicalParams fig2_params(double eta_hz, double n_atoms) {
    return PhysicalParams::from_ordinary_hz(1e5, 1e8, 1.4e3, 1e7, eta_hz, 0.0, n_atoms);
}

unsigned workers_from_env() {
    if (const char* env = std::getenv("SRL_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;
}

struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> run;
};

// 1 ------------------------------------------------------------------------
bool crit1(std::string& detail) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> logr(3.0, 9.0), logN(0.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double gamma = std::pow(10.0, logr(rng));
        const double eta = std::pow(10.0, logr(rng));
        const auto p = PhysicalParams::angular(gamma, std::pow(10.0, logr(rng)), 0.0,
                                               std::pow(10.0, logr(rng)), eta, 0.0,
                                               std::pow(10.0, logN(rng)));
        const auto s = steady_state(p, SteadyMethod::rootfind);
        worst = std::max(worst, std::abs(s.inversion - (eta - gamma) / (eta + gamma)));
        worst = std::max(worst, std::abs(s.n_photon));
    }
    detail = "worst deviation " + io::format_double(worst) + " over 100 rate sets";
    return worst < 1e-8;
}

// 2 ------------------------------------------------------------------------
bool crit2(std::string& detail) {
    std::mt19937 rng(22);
    std::uniform_real_distribution<double> logr(3.0, 9.0);
    double worst_ratio = 0.0, worst_ident = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double gamma = std::pow(10.0, logr(rng));
        const double kappa = std::pow(10.0, logr(rng));
        const double g = std::pow(10.0, logr(rng));
        const auto d = derive(PhysicalParams::angular(gamma, kappa, g, 0, 0, 0, 1));
        worst_ratio = std::max(worst_ratio, rel(d.n_c / d.m_c, kappa / gamma));
        worst_ident =
            std::max(worst_ident, rel(linewidth_bad_cavity_photon(gamma, kappa, d.m_c),
                                      linewidth_cooperativity(d.c1, gamma)));
    }
    bool ok = worst_ratio < 1e-12 && worst_ident < 1e-12;
    // good-cavity convergence of the dressed formula to the quantum limit
    const double nu = 2e14, gamma = 1e6;
    for (double half_ratio : {0.005, 1e-3, 1e-4, 1e-5}) {
        const double kappa = 2.0 * gamma * half_ratio;
        const double st = linewidth_schawlow_townes(nu, kappa, 1e-6);
        const double hk = linewidth_bad_cavity_haken(nu, nu, kappa, gamma, 1e-6, 1.0, 0.0);
        ok = ok && rel(hk, st) < 10.0 * half_ratio;
        if (half_ratio == 0.005) ok = ok && rel(hk, st) < 0.01;
    }
    detail = "N_c/M_c dev " + io::format_double(worst_ratio) + ", Eq3<->Eq4 dev " +
             io::format_double(worst_ident);
    return ok;
}

// 3 ------------------------------------------------------------------------
bool crit3(std::string& detail) {
    const auto p = fig2_params(1e6, 1e10);
    const auto d = derive(p);
    const double lw = linewidth_cooperativity(d.c1, p.gamma);
    detail = "C1 = " + io::format_double(d.c1) + ", N_crit = " + io::format_double(d.n_crit) +
             ", Eq4 linewidth = " + io::format_double(lw) + " Hz";
    return rel(d.c1, 1.96e-7) < 1e-12 && rel(d.n_crit, 1.02e9) < 0.01 &&
           rel(lw, 6.2e-3) < 0.01;
}

// 4 ------------------------------------------------------------------------
bool crit4(std::string& detail) {
    // decoupled cavity pole through the full pipeline
    auto p = PhysicalParams::angular(two_pi * 50.0, two_pi * 1e5, 0.0, 0.0, two_pi * 200.0,
                                     0.0, 10.0);
    MeanFieldState fake;
    fake.n_photon = 1.0;
    fake.inversion = 0.2;
    LinewidthOptions opt;
    opt.steady_override = fake;
    opt.max_samples = 1 << 14;
    const double pole_dev = rel(linewidth(p, opt).fwhm_hz, p.kappa / two_pi);
    bool ok = pole_dev < 5e-3;

    // synthetic exponential correlations across nine decades
    double worst = 0.0;
    for (int e = -3; e <= 5; ++e) {
        const double fwhm_hz = std::pow(10.0, e);
        const double rate = pi * fwhm_hz;
        CorrelationTrace tr;
        const std::size_t n = 8192;
        const double t_max = 9.21 / rate;
        for (std::size_t k = 0; k <= n; ++k) {
            const double t = t_max * static_cast<double>(k) / static_cast<double>(n);
            tr.times.push_back(t);
            tr.g1.push_back(std::exp(-rate * t));
        }
        const auto spec = power_spectrum(tr, SpectrumWindow::none, 8);
        const auto fit = fit_lorentzian(spec);
        worst = std::max(worst, rel(fit.fwhm_hz, fwhm_hz));
    }
    ok = ok && worst < 5e-3;
    detail = "cavity-pole dev " + io::format_double(pole_dev) +
             ", exponential sweep worst " + io::format_double(worst);
    return ok;
}

// 5 ------------------------------------------------------------------------
bool crit5(std::string& detail) {
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> leta(5.0, 7.0), lN(9.35, 11.0);
    int kept = 0, tried = 0;
    double worst = 0.0;
    while (kept < 200 && tried < 900) {
        ++tried;
        const auto p = fig2_params(std::pow(10.0, leta(rng)), std::pow(10.0, lN(rng)));
        MeanFieldState ss;
        try {
            ss = steady_state(p);
        } catch (const NumericalError&) {
            continue;
        }
        if (ss.n_photon < 1.0) continue;
        const auto modes = regression_modes(p, ss);
        const double ls = -modes.lambda_slow.real();
        const double lf = -modes.lambda_fast.real();
        if (!(ls > 0.0) || lf / ls < 10.0) continue;
        LinewidthOptions opt;
        opt.max_samples = 1 << 14;
        opt.steady_override = ss;
        const auto res = linewidth(p, opt);
        worst = std::max(worst, rel(res.fwhm_hz, 2.0 * ls / two_pi));
        ++kept;
    }
    detail = std::to_string(kept) + " draws with >= 10x mode separation, worst deviation " +
             io::format_double(worst);
    return kept >= 200 && worst < 0.02;
}

// 6 ------------------------------------------------------------------------
bool crit6(std::string& detail) {
    const auto base = PhysicalParams::from_ordinary_hz(7.5e3, 160e3, 100e3, 0.0, 0.0, 0.0, 4);
    std::vector<double> etas;
    const double lo = base.gamma, hi = 10.0 * base.kappa;
    for (int k = 0; k < 8; ++k) {
        etas.push_back(std::exp(std::log(lo) + k * (std::log(hi) - std::log(lo)) / 7.0));
    }
    std::vector<double> ns = {4, 5, 6, 7, 8, 9, 10};
    dicke::CompareOptions copt;
    copt.n_fock = 16;
    copt.workers = workers_from_env();
    const auto table = dicke::compare_mft_me(base, ns, etas, copt);
    bool ok = true;
    double worst_ratio = 1.0;
    int worst_arg = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        std::size_t arg_me = 0, arg_mft = 0;
        for (std::size_t k = 0; k < etas.size(); ++k) {
            const auto& row = table.rows[i * etas.size() + k];
            ok = ok && !row.flagged;
            worst_ratio = std::max({worst_ratio, row.ratio, 1.0 / row.ratio});
            if (row.n_me > table.rows[i * etas.size() + arg_me].n_me) arg_me = k;
            if (row.n_mft > table.rows[i * etas.size() + arg_mft].n_mft) arg_mft = k;
        }
        const int darg = std::abs(static_cast<int>(arg_me) - static_cast<int>(arg_mft));
        worst_arg = std::max(worst_arg, darg);
        ok = ok && darg <= 1;
    }
    detail = "worst MFT/ME factor " + io::format_double(worst_ratio) +
             ", worst argmax offset " + std::to_string(worst_arg) + " grid steps";
    return ok;
}

// 7 ------------------------------------------------------------------------
bool crit7(std::string& detail) {
    // exactness: reduced dynamics against the full Hilbert space
    double worst = 0.0;
    for (int n : {2, 3}) {
        dicke::OracleParams op;
        op.gamma_collective = 0.4;
        op.gamma_local_down = 0.8;
        op.gamma_local_up = 0.5;
        op.cavity = {1.3, 0.9, 0.0, 5};
        const auto space = dicke::DickeSpace::make(n);
        const dicke::Liouvillian liou(op, space);
        std::vector<double> grid;
        for (int k = 1; k <= 6; ++k) grid.push_back(0.4 * k);
        dicke::MeEvolveOptions eopt;
        eopt.rtol = 1e-11;
        eopt.atol = 1e-13;
        const auto red =
            dicke::me_evolve(liou, dicke::DensityState::excited(space, 5), grid, eopt);
        test_support::BruteForce bf(n, op);
        const auto full = bf.evolve(bf.excited_vacuum(), grid, 1e-11);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            worst = std::max(worst, std::abs(red.n_photon[k] - full.n_photon[k]));
        }
    }
    const bool exact_ok = worst < 1e-8;

    // collective-only cascade: early-rate scaling measured as the log-log
    // slope of the peak emission rate over N = 4, 8, 16
    double peaks[3];
    const int ns[3] = {4, 8, 16};
    for (int i = 0; i < 3; ++i) {
        dicke::OracleParams op;
        op.gamma_collective = 1.0;
        op.cavity = {0.0, 0.0, 0.0, 2};
        const auto space = dicke::DickeSpace::make(ns[i]);
        const dicke::Liouvillian liou(op, space);
        std::vector<double> grid;
        for (int k = 1; k <= 400; ++k) grid.push_back(8.0 / ns[i] * k / 400.0);
        dicke::MeEvolveOptions eopt;
        eopt.rtol = 1e-10;
        eopt.check_invariants = false;
        const auto res =
            dicke::me_evolve(liou, dicke::DensityState::excited(space, 2), grid, eopt);
        peaks[i] = 0.0;
        for (double v : res.jpjm) peaks[i] = std::max(peaks[i], v);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 3; ++i) {
        const double x = std::log(ns[i]), y = std::log(peaks[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    const bool scaling_ok = std::abs(slope - 2.0) <= 0.10;  // within 5% of 2

    detail = "brute-force match " + std::string(exact_ok ? "PASS" : "FAIL") + " (worst " +
             io::format_double(worst) + "); N^2 early-rate scaling " +
             (scaling_ok ? "PASS" : "FAIL") + " (peaks " + io::format_double(peaks[0]) + "/" +
             io::format_double(peaks[1]) + "/" + io::format_double(peaks[2]) +
             ", measured exponent " + io::format_double(slope) +
             " vs 2.00 +- 0.10; the exact cascade gives 1.745 at these N)";
    return exact_ok && scaling_ok;
}

// 8 ------------------------------------------------------------------------
bool crit8(std::string& detail) {
    const auto base = fig2_params(1e6, 1e10);
    const auto d = derive(base);
    sweep::GridSpec spec;
    spec.n_axis = {60, 1e6, 1e12, true};
    spec.eta_axis = {60, 1e3, 1e9, true};
    sweep::SweepOptions opt;
    opt.workers = workers_from_env();
    opt.linewidth_samples = 1 << 14;

    const auto photon = sweep::sweep_photon(spec, base, opt);
    const auto lw = sweep::sweep_linewidth(spec, base, opt);

    // (a) the bright region lies below the pump threshold line N C1 gamma;
    // one grid step of smearing is allowed at the boundary
    const double gamma_ord = angular_to_hz(base.gamma);
    const double eta_step = std::pow(spec.eta_axis.max_value / spec.eta_axis.min_value,
                                     1.0 / static_cast<double>(spec.eta_axis.count - 1));
    bool bright_ok = true;
    for (std::size_t i = 0; i < photon.n_values.size(); ++i) {
        const double line = photon.n_values[i] * d.c1 * gamma_ord;
        for (std::size_t j = 0; j < photon.eta_values_hz.size(); ++j) {
            const auto& cell = photon.at(i, j);
            if (cell.status == sweep::CellStatus::ok && cell.n_photon > 100.0) {
                if (photon.eta_values_hz[j] > line * eta_step) bright_ok = false;
            }
        }
    }

    // (b) connected sub-gamma region inside {gamma < eta < chi} x {N > N_crit}
    const double chi_ord = angular_to_hz(base.chi);
    const std::size_t nj = lw.eta_values_hz.size();
    auto narrow = [&](std::size_t i, std::size_t j) {
        const auto& cell = lw.at(i, j);
        return cell.status == sweep::CellStatus::ok && cell.fwhm_hz < gamma_ord &&
               lw.eta_values_hz[j] > gamma_ord && lw.eta_values_hz[j] < chi_ord &&
               lw.n_values[i] > d.n_crit;
    };
    std::size_t best_component = 0;
    std::vector<char> seen(lw.cells.size(), 0);
    for (std::size_t i = 0; i < lw.n_values.size(); ++i) {
        for (std::size_t j = 0; j < nj; ++j) {
            if (seen[i * nj + j] || !narrow(i, j)) continue;
            std::size_t size = 0;
            std::queue<std::pair<std::size_t, std::size_t>> queue;
            queue.push({i, j});
            seen[i * nj + j] = 1;
            while (!queue.empty()) {
                const auto [a, b] = queue.front();
                queue.pop();
                ++size;
                const std::pair<long, long> nbrs[4] = {{long(a) - 1, long(b)},
                                                       {long(a) + 1, long(b)},
                                                       {long(a), long(b) - 1},
                                                       {long(a), long(b) + 1}};
                for (const auto& [na, nb] : nbrs) {
                    if (na < 0 || nb < 0 || na >= long(lw.n_values.size()) ||
                        nb >= long(nj)) {
                        continue;
                    }
                    const std::size_t idx = std::size_t(na) * nj + std::size_t(nb);
                    if (!seen[idx] && narrow(std::size_t(na), std::size_t(nb))) {
                        seen[idx] = 1;
                        queue.push({std::size_t(na), std::size_t(nb)});
                    }
                }
            }
            best_component = std::max(best_component, size);
        }
    }
    const bool narrow_ok = best_component >= 4;

    // (c) grid convergence around the marked narrow point. The map minimum
    // itself sits on the self-pulsing stability boundary where the width dives
    // toward zero, so the representative point is the log-centroid cell of the
    // largest sub-gamma component; the local minimum there must be stable
    // under halving the grid spacing over the same +-2-step window.
    double ci_log = 0.0, cj_log = 0.0;
    std::size_t n_narrow = 0;
    for (std::size_t i = 0; i < lw.n_values.size(); ++i) {
        for (std::size_t j = 0; j < nj; ++j) {
            if (narrow(i, j)) {
                ci_log += std::log10(lw.n_values[i]);
                cj_log += std::log10(lw.eta_values_hz[j]);
                ++n_narrow;
            }
        }
    }
    ci_log /= std::max<std::size_t>(n_narrow, 1);
    cj_log /= std::max<std::size_t>(n_narrow, 1);
    std::size_t mi = 0, mj = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lw.n_values.size(); ++i) {
        for (std::size_t j = 0; j < nj; ++j) {
            if (!narrow(i, j)) continue;
            const double di = std::log10(lw.n_values[i]) - ci_log;
            const double dj = std::log10(lw.eta_values_hz[j]) - cj_log;
            if (di * di + dj * dj < best_dist) {
                best_dist = di * di + dj * dj;
                mi = i;
                mj = j;
            }
        }
    }
    const double n_step = std::pow(spec.n_axis.max_value / spec.n_axis.min_value,
                                   1.0 / static_cast<double>(spec.n_axis.count - 1));
    double min_fwhm = std::numeric_limits<double>::infinity();
    for (std::size_t i = (mi >= 2 ? mi - 2 : 0); i <= mi + 2 && i < lw.n_values.size(); ++i) {
        for (std::size_t j = (mj >= 2 ? mj - 2 : 0); j <= mj + 2 && j < nj; ++j) {
            const auto& cell = lw.at(i, j);
            if (cell.status == sweep::CellStatus::ok && cell.fwhm_hz < min_fwhm) {
                min_fwhm = cell.fwhm_hz;
            }
        }
    }
    sweep::GridSpec fine;
    fine.n_axis = {9, lw.n_values[mi] / (n_step * n_step),
                   lw.n_values[mi] * (n_step * n_step), true};
    fine.eta_axis = {9, lw.eta_values_hz[mj] / (eta_step * eta_step),
                     lw.eta_values_hz[mj] * (eta_step * eta_step), true};
    const auto refined = sweep::sweep_linewidth(fine, base, opt);
    double min_ref = std::numeric_limits<double>::infinity();
    for (const auto& cell : refined.cells) {
        if (cell.status == sweep::CellStatus::ok && cell.fwhm_hz < min_ref) {
            min_ref = cell.fwhm_hz;
        }
    }
    const bool refine_ok = std::isfinite(min_ref) && rel(min_ref, min_fwhm) < 0.10;

    const auto counts = lw.count_statuses();
    detail = "bright-region bound " + std::string(bright_ok ? "PASS" : "FAIL") +
             "; sub-gamma component " + std::to_string(best_component) + " cells " +
             (narrow_ok ? "PASS" : "FAIL") + "; min FWHM " + io::format_double(min_fwhm) +
             " Hz -> refined " + io::format_double(min_ref) + " Hz " +
             (refine_ok ? "PASS" : "FAIL") + " (statuses ok/nc/ff/fs " +
             std::to_string(counts.ok) + "/" + std::to_string(counts.no_convergence) + "/" +
             std::to_string(counts.fit_failed) + "/" + std::to_string(counts.fit_skipped) +
             ")";
    return bright_ok && narrow_ok && refine_ok;
}

// 9 ------------------------------------------------------------------------
bool crit9(std::string& detail) {
    const auto base = fig2_params(1e6, 1e10);
    sweep::GridSpec spec;
    spec.n_axis = {12, 1e8, 1e11, true};
    spec.eta_axis = {10, 1e4, 1e8, true};
    sweep::SweepOptions w1, w2;
    w1.workers = 1;
    w2.workers = 2;
    w1.linewidth_samples = w2.linewidth_samples = 1 << 13;
    const auto g1 = sweep::sweep_linewidth(spec, base, w1);
    const auto g2 = sweep::sweep_linewidth(spec, base, w2);
    const nlohmann::json cfg{{"criterion", 9}};
    const auto over = sweep::overlays(base, spec.n_axis);
    const bool same = sweep::matrix_csv(g1, cfg) == sweep::matrix_csv(g2, cfg) &&
                      sweep::status_csv(g1, cfg) == sweep::status_csv(g2, cfg) &&
                      io::finalize_json(cfg, sweep::manifest_data(g1, over)) ==
                          io::finalize_json(cfg, sweep::manifest_data(g2, over));
    detail = same ? "canonical outputs byte-identical for 1 and 2 workers"
                  : "outputs differ between worker counts";
    return same;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "analytic g = 0 steady states", crit1},
        {2, "closed-form identities and limits", crit2},
        {3, "figure-2 derived anchors", crit3},
        {4, "spectrum pipeline against analytic widths", crit4},
        {5, "pipeline FWHM against regression eigenvalues", crit5},
        {6, "mean-field vs master-equation photon numbers", crit6},
        {7, "Dicke-basis exactness and cascade scaling", crit7},
        {8, "figure-2 map structure on a 60x60 sweep", crit8},
        {9, "sweep determinism across worker counts", crit9},
    };
    std::vector<int> selected;
    for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d: %s [%.1f s] %s\n", ok ? "PASS" : "FAIL", c.id, c.label,
                    dt, detail.c_str());
        std::fflush(stdout);
        failures += !ok;
    }
    return failures == 0 ? 0 : 1;
}
