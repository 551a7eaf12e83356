#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "srl/spectrum.hpp"
#include "support/oracles.hpp"

using namespace srl;

namespace {

PhysicalParams fig2_params(double eta_hz, double n_atoms) {
    return PhysicalParams::from_ordinary_hz(1e5, 1e8, 1.4e3, 1e7, eta_hz, 0.0, n_atoms);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CorrelationTrace synthetic_trace(double rate, double omega0, double t_max, std::size_t n,
                                 double amp = 1.0) {
    CorrelationTrace tr;
    tr.times.resize(n + 1);
    tr.g1.resize(n + 1);
    const double dt = t_max / static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        tr.times[k] = t;
        tr.g1[k] = amp * std::exp(std::complex<double>(-rate * t, omega0 * t));
    }
    tr.steady.n_photon = amp;
    return tr;
}

}  // namespace

TEST_CASE("regression correlation: decoupled field decay at g = 0") {
    auto p = PhysicalParams::angular(two_pi * 50.0, two_pi * 1e5, 0.0, 0.0, two_pi * 200.0,
                                     0.0, 10.0);
    MeanFieldState fake;  // injected: no lasing steady state exists at g = 0
    fake.n_photon = 2.0;
    fake.inversion = 0.3;
    RegressionOptions opt;
    opt.steady_residual_tol = std::numeric_limits<double>::infinity();
    opt.rtol = 1e-11;
    const double dt = 0.05 / p.kappa;
    const auto tr = regression_correlation(fake, p, 400.0 * dt, dt, opt);
    CHECK(tr.g1.front() == std::complex<double>{2.0, 0.0});
    for (std::size_t k = 0; k < tr.g1.size(); k += 7) {
        const double expect = 2.0 * std::exp(-0.5 * p.kappa * tr.times[k]);
        CHECK(std::abs(tr.g1[k] - expect) < 1e-8 * 2.0);
    }
}

TEST_CASE("regression correlation matches the matrix-exponential oracle") {
    const auto p = fig2_params(1e6, 2e9);
    const auto ss = steady_state(p);
    const double dt = 0.08 / p.kappa;
    const std::size_t n = 600;
    const auto tr = regression_correlation(ss, p, static_cast<double>(n) * dt, dt);
    // independent closed-form solution via 2x2 eigen-decomposition
    const auto A = regression_matrix(p, ss.inversion);
    for (std::size_t k = 0; k < tr.g1.size(); k += 41) {
        const auto exact = test_support::expm2x2_apply(A, {ss.n_photon, 0.0},
                                                       std::conj(ss.coherence), tr.times[k]);
        CHECK(std::abs(tr.g1[k] - exact.first) <=
              1e-8 * std::abs(exact.first) + 1e-10 * ss.n_photon);
    }
}

TEST_CASE("regression correlation rejects bad input") {
    const auto p = fig2_params(1e6, 2e9);
    const auto ss = steady_state(p);
    SUBCASE("non-steady state") {
        MeanFieldState off = ss;
        off.n_photon *= 1.5;
        CHECK_THROWS_AS(regression_correlation(off, p, 1e-6, 1e-10), NumericalError);
    }
    SUBCASE("dt too coarse while the fast mode carries weight") {
        // far below threshold both regression poles are fast and comparably
        // weighted, so an under-resolving grid is rejected
        const auto p_small = fig2_params(1e6, 1e6);
        MeanFieldState fake;
        fake.n_photon = 1.0;
        fake.inversion = 0.5;
        RegressionOptions opt;
        opt.steady_residual_tol = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(
            regression_correlation(fake, p_small, 1e-5, 10.0 / p_small.kappa, opt),
            NumericalError);
    }
    SUBCASE("nonsense grid") {
        CHECK_THROWS_AS(regression_correlation(ss, p, -1.0, 1e-10), ConfigError);
        CHECK_THROWS_AS(regression_correlation(ss, p, 1e-10, 1e-9), ConfigError);
    }
}

TEST_CASE("power spectrum of synthetic exponentials") {
    SUBCASE("pure decay gives a zero-centered Lorentzian of ordinary FWHM rate/pi") {
        const double rate = two_pi * 100.0;
        const auto tr = synthetic_trace(rate, 0.0, 9.21 / rate, 4096);
        const auto spec = power_spectrum(tr, SpectrumWindow::none, 8);
        const auto fit = fit_lorentzian(spec);
        CHECK(rel(fit.fwhm_hz, rate / pi) < 5e-3);
        CHECK(std::abs(fit.center_hz) < spec.df_hz);
    }
    SUBCASE("phase rotation shifts the peak (shift theorem)") {
        const double rate = two_pi * 100.0, f0 = 777.0;
        const auto tr = synthetic_trace(rate, two_pi * f0, 9.21 / rate, 8192);
        const auto spec = power_spectrum(tr, SpectrumWindow::none, 8);
        const auto fit = fit_lorentzian(spec);
        CHECK(rel(fit.fwhm_hz, rate / pi) < 5e-3);
        CHECK(std::abs(fit.center_hz - f0) < 2.0 * spec.df_hz);
    }
    SUBCASE("spectral values match direct transform evaluation") {
        const double rate = two_pi * 350.0;
        const auto tr = synthetic_trace(rate, two_pi * 50.0, 9.21 / rate, 2048);
        const auto spec = power_spectrum(tr, SpectrumWindow::none, 4);
        // quadrature oracle: direct evaluation of the discretized transform
        std::mt19937 rng(7);
        std::uniform_int_distribution<std::size_t> pick(0, spec.freqs_hz.size() - 1);
        double peak = 0.0;
        for (double v : spec.psd) peak = std::max(peak, v);
        for (int trial = 0; trial < 12; ++trial) {
            const std::size_t k = pick(rng);
            const double direct = test_support::direct_psd(tr.times, tr.g1, spec.freqs_hz[k]);
            CHECK(std::abs(spec.psd[k] - direct) <= 1e-6 * std::max(std::abs(direct), peak * 1e-3));
        }
    }
    SUBCASE("psd is real and nearly non-negative after symmetrization") {
        const double rate = two_pi * 10.0;
        const auto tr = synthetic_trace(rate, 0.0, 9.21 / rate, 4096);
        const auto spec = power_spectrum(tr, SpectrumWindow::none, 8);
        double mx = 0.0, mn = 0.0;
        for (double v : spec.psd) {
            mx = std::max(mx, v);
            mn = std::min(mn, v);
        }
        CHECK(mn >= -1e-9 * mx);
    }
    SUBCASE("undecayed tail is rejected without a window and damped with one") {
        const double rate = two_pi * 1.0;
        const auto tr = synthetic_trace(rate, 0.0, 0.5 / rate, 512);  // tail ~ 0.6
        CHECK_THROWS_AS(power_spectrum(tr, SpectrumWindow::none, 2), NumericalError);
        const auto spec = power_spectrum(tr, SpectrumWindow::exponential_tail, 2);
        CHECK(spec.window_fwhm_hz > 0.0);
    }
    SUBCASE("moderate truncation attaches a warning") {
        const double rate = two_pi * 1.0;
        const auto tr = synthetic_trace(rate, 0.0, 7.0 / rate, 512);  // tail ~ 9e-4
        const auto spec = power_spectrum(tr, SpectrumWindow::none, 2);
        CHECK(!spec.truncation_warning.empty());
    }
}

TEST_CASE("lorentzian fit") {
    auto make_spec = [](double A, double nu0, double sig, double span, std::size_t m) {
        Spectrum s;
        s.df_hz = span / static_cast<double>(m);
        for (std::size_t k = 0; k <= m; ++k) {
            const double nu = -span / 2 + static_cast<double>(k) * s.df_hz;
            s.freqs_hz.push_back(nu);
            s.psd.push_back(A / pi * sig / ((nu - nu0) * (nu - nu0) + sig * sig));
        }
        return s;
    };
    SUBCASE("recovers exact synthetic parameters") {
        const auto s = make_spec(1.0, 0.0, 0.5, 100.0, 4000);
        const auto fit = fit_lorentzian(s);
        CHECK(rel(fit.hwhm_hz, 0.5) < 1e-6);
        CHECK(std::abs(fit.center_hz) < 1e-8);
        CHECK(rel(fit.amplitude, 1.0) < 1e-6);
        CHECK(fit.rms_residual_rel < 1e-9);
    }
    SUBCASE("amplitude scaling leaves center and width fixed") {
        const auto s1 = make_spec(1.0, 3.0, 0.8, 200.0, 4000);
        const auto s2 = make_spec(13.0, 3.0, 0.8, 200.0, 4000);
        const auto f1 = fit_lorentzian(s1);
        const auto f2 = fit_lorentzian(s2);
        CHECK(rel(f2.amplitude, 13.0 * f1.amplitude) < 1e-8);
        CHECK(std::abs(f2.center_hz - f1.center_hz) < 1e-8);
        CHECK(rel(f2.hwhm_hz, f1.hwhm_hz) < 1e-8);
    }
    SUBCASE("invariant under frequency translation") {
        auto s = make_spec(2.0, 0.0, 1.5, 300.0, 5000);
        const auto f0 = fit_lorentzian(s);
        for (auto& nu : s.freqs_hz) nu += 1234.5;
        const auto f1 = fit_lorentzian(s);
        CHECK(std::abs(f1.center_hz - (f0.center_hz + 1234.5)) < 1e-8 * 1234.5);
        CHECK(rel(f1.hwhm_hz, f0.hwhm_hz) < 1e-8);
        CHECK(rel(f1.amplitude, f0.amplitude) < 1e-8);
    }
    SUBCASE("too few points across the half maximum is an error") {
        const auto s = make_spec(1.0, 0.0, 0.4, 400.0, 800);  // ~2 points across
        CHECK_THROWS_AS(fit_lorentzian(s), NumericalError);
    }
}

TEST_CASE("resolution convergence in pad factor") {
    const double rate = two_pi * 40.0;
    const auto tr = synthetic_trace(rate, 0.0, 9.21 / rate, 4096);
    double prev = 0.0;
    for (int pad : {8, 16}) {
        const auto spec = power_spectrum(tr, SpectrumWindow::none, pad);
        const auto fit = fit_lorentzian(spec);
        // the half-max region must hold >= 32 samples before convergence is judged
        double peak = 0.0;
        std::size_t count = 0;
        for (double v : spec.psd) peak = std::max(peak, v);
        for (double v : spec.psd) count += (v >= 0.5 * peak);
        CHECK(count >= 32);
        if (prev > 0.0) CHECK(rel(fit.hwhm_hz, prev) < 1e-3);
        prev = fit.hwhm_hz;
    }
}

TEST_CASE("pure exponential linewidth across decades") {
    for (double fwhm_hz : {1e-3, 1e0, 1e3, 1e6}) {
        const double rate = pi * fwhm_hz;  // angular FWHM = 2 rate
        const auto tr = synthetic_trace(rate, 0.0, 9.21 / rate, 8192);
        const auto spec = power_spectrum(tr, SpectrumWindow::none, 8);
        const auto fit = fit_lorentzian(spec);
        CHECK(rel(fit.fwhm_hz, fwhm_hz) < 5e-3);
    }
}

TEST_CASE("end-to-end linewidth") {
    SUBCASE("g = 0 cavity pole via injected field state") {
        auto p = PhysicalParams::angular(two_pi * 50.0, two_pi * 1e5, 0.0, 0.0,
                                         two_pi * 200.0, 0.0, 10.0);
        MeanFieldState fake;
        fake.n_photon = 1.0;
        fake.inversion = 0.2;
        LinewidthOptions opt;
        opt.steady_override = fake;
        opt.max_samples = 1 << 14;
        const auto res = linewidth(p, opt);
        CHECK(rel(res.fwhm_hz, p.kappa / two_pi) < 5e-3);
    }
    SUBCASE("white-asterisk regime is sub-gamma") {
        const auto p = fig2_params(1e6, 1e10);
        LinewidthOptions opt;
        opt.max_samples = 1 << 16;
        const auto res = linewidth(p, opt);
        CHECK(res.fwhm_hz < p.gamma / two_pi);  // below the atomic decay rate
        CHECK(res.fwhm_hz > 0.0);
        // eigenvalue cross-check at large mode separation
        const double sep =
            std::abs(res.modes.lambda_fast.real() / res.modes.lambda_slow.real());
        const double eig_fwhm = -2.0 * res.modes.lambda_slow.real() / two_pi;
        CHECK(sep > 10.0);
        CHECK(rel(res.fwhm_hz, eig_fwhm) < 0.02);
    }
    SUBCASE("eigenvalue cross-check across random lasing draws") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> leta(5.0, 7.0), lN(9.4, 11.0);
        int tested = 0;
        for (int k = 0; k < 60 && tested < 12; ++k) {
            const double eta_hz = std::pow(10.0, leta(rng));
            const double n_atoms = std::pow(10.0, lN(rng));
            const auto p = fig2_params(eta_hz, n_atoms);
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
            const auto res = linewidth(p, opt);
            CHECK(rel(res.fwhm_hz, 2.0 * ls / two_pi) < 0.02);
            ++tested;
        }
        CHECK(tested >= 8);
    }
}
