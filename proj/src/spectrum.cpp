#include "srl/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "detail/stiff.hpp"

namespace srl {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct Modes2x2 {
    std::complex<double> l1, l2;    // eigenvalues
    std::complex<double> v1, v2;    // C_sigma/C_a ratio per mode
};

Modes2x2 eig2x2(const RegressionMatrix& A) {
    // closed form for [[aa, as],[sa, ss]]
    const std::complex<double> tr = A.aa + A.ss;
    const std::complex<double> det = A.aa * A.ss - A.as * A.sa;
    const std::complex<double> disc = std::sqrt(tr * tr - 4.0 * det);
    Modes2x2 m;
    m.l1 = 0.5 * (tr + disc);
    m.l2 = 0.5 * (tr - disc);
    auto ratio = [&](std::complex<double> lam) -> std::complex<double> {
        if (std::abs(A.as) > 1e-300) return (lam - A.aa) / A.as;
        return {0.0, 0.0};
    };
    m.v1 = ratio(m.l1);
    m.v2 = ratio(m.l2);
    return m;
}

}  // namespace

RegressionMatrix regression_matrix(const PhysicalParams& p, double inversion_ss) {
    // Frame rotating at the atomic frequency: the cavity pole carries the
    // detuning, the atomic pole is real at resonance.
    const std::complex<double> i{0.0, 1.0};
    RegressionMatrix A;
    A.aa = -(0.5 * p.kappa - i * p.delta);
    A.as = i * (0.5 * p.g * p.n_atoms);
    A.sa = -i * (0.5 * p.g * inversion_ss);
    A.ss = -((p.eta + p.gamma) / 2.0 + p.chi);
    return A;
}

RegressionModes regression_modes(const PhysicalParams& p, const MeanFieldState& steady) {
    const RegressionMatrix A = regression_matrix(p, steady.inversion);
    const Modes2x2 m = eig2x2(A);
    // C_a solves the scalar equation C_a'' - tr C_a' + det C_a = 0; its modal
    // amplitudes follow from C_a(0) and C_a'(0) alone, which stays well posed
    // in the decoupled (triangular) limits where eigenvector ratios degenerate.
    const std::complex<double> ca0{steady.n_photon, 0.0};
    const std::complex<double> cs0 = std::conj(steady.coherence);
    const std::complex<double> dca0 = A.aa * ca0 + A.as * cs0;
    std::complex<double> a1, a2;
    if (std::abs(m.l1 - m.l2) < 1e-12 * std::max(std::abs(m.l1), 1e-300)) {
        a1 = ca0;  // degenerate pair; treated as a single mode
        a2 = 0.0;
    } else {
        a1 = (dca0 - m.l2 * ca0) / (m.l1 - m.l2);
        a2 = ca0 - a1;
    }
    RegressionModes out;
    if (std::abs(m.l1.real()) <= std::abs(m.l2.real())) {
        out.lambda_slow = m.l1;
        out.lambda_fast = m.l2;
        out.amp_slow = a1;
        out.amp_fast = a2;
    } else {
        out.lambda_slow = m.l2;
        out.lambda_fast = m.l1;
        out.amp_slow = a2;
        out.amp_fast = a1;
    }
    return out;
}

CorrelationTrace regression_correlation(const MeanFieldState& steady,
                                        const PhysicalParams& p, double t_max, double dt,
                                        const RegressionOptions& opt) {
    p.validate();
    if (!(t_max > 0.0) || !(dt > 0.0) || dt > t_max) {
        throw ConfigError("regression: need 0 < dt <= t_max");
    }
    const double resid = steady_residual(steady, p);
    if (resid > opt.steady_residual_tol * rate_scale(p)) {
        std::ostringstream os;
        os << "regression: input is not a steady state (residual " << resid << ")";
        throw NumericalError(os.str());
    }
    // Resolution contract: dt <= 0.1/kappa, unless every under-resolved mode
    // carries negligible spectral weight.
    const RegressionModes modes = regression_modes(p, steady);
    if (p.kappa > 0.0 && dt > 0.1 / p.kappa) {
        const double ws = std::abs(modes.amp_slow) /
                          std::max(1e-300, std::abs(modes.lambda_slow.real()));
        const double wf = std::abs(modes.amp_fast) /
                          std::max(1e-300, std::abs(modes.lambda_fast.real()));
        const bool fast_unresolved = std::abs(modes.lambda_fast) * dt > 0.5;
        if (fast_unresolved && wf > 1e-6 * ws) {
            std::ostringstream os;
            os << "regression: dt = " << dt << " too coarse for the fast mode (0.1/kappa = "
               << 0.1 / p.kappa << ", spectral weight ratio " << wf / std::max(ws, 1e-300)
               << ")";
            throw NumericalError(os.str());
        }
    }

    const RegressionMatrix A = regression_matrix(p, steady.inversion);
    // real 4-vector z = (Re Ca, Im Ca, Re Cs, Im Cs); dz = M z with constant M
    const double M[4][4] = {
        {A.aa.real(), -A.aa.imag(), A.as.real(), -A.as.imag()},
        {A.aa.imag(), A.aa.real(), A.as.imag(), A.as.real()},
        {A.sa.real(), -A.sa.imag(), A.ss.real(), -A.ss.imag()},
        {A.sa.imag(), A.sa.real(), A.ss.imag(), A.ss.real()},
    };
    detail::StiffSystem system{
        [&M](const double* z, double* dz) {
            for (int r = 0; r < 4; ++r) {
                dz[r] = M[r][0] * z[0] + M[r][1] * z[1] + M[r][2] * z[2] + M[r][3] * z[3];
            }
        },
        [&M](const double*, double* J) {
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) J[r * 4 + c] = M[r][c];
        },
        4};

    const std::size_t n = static_cast<std::size_t>(std::floor(t_max / dt + 0.5));
    std::vector<double> times(n + 1);
    for (std::size_t k = 0; k <= n; ++k) times[k] = static_cast<double>(k) * dt;

    CorrelationTrace trace;
    trace.params = p;
    trace.steady = steady;
    trace.times = times;
    trace.g1.resize(times.size());
    trace.g1[0] = {steady.n_photon, 0.0};

    std::vector<double> z = {steady.n_photon, 0.0, std::conj(steady.coherence).real(),
                             std::conj(steady.coherence).imag()};
    std::vector<double> interior(times.begin() + 1, times.end());
    std::size_t next = 1;
    auto on_sample = [&trace, &next](double, const std::vector<double>& zi) {
        trace.g1[next++] = {zi[0], zi[1]};
    };
    // scale-aware absolute tolerance; the trace decays over many decades
    const double atol = opt.rtol * std::max(1.0, steady.n_photon) * 1e-4;
    detail::integrate_stiff(system, z, 0.0, times.back(), opt.rtol, atol, opt.max_steps,
                            interior, on_sample);
    return trace;
}

Spectrum power_spectrum(const CorrelationTrace& trace, SpectrumWindow window,
                        int pad_factor) {
    const std::size_t n = trace.g1.size();
    if (n < 2) throw ConfigError("power_spectrum: trace too short");
    if (pad_factor < 1) throw ConfigError("power_spectrum: pad_factor must be >= 1");
    const double dt = trace.dt();
    const double g10 = std::abs(trace.g1.front());
    if (g10 <= 0.0) throw NumericalError("power_spectrum: zero-power trace");

    const double tail = std::abs(trace.g1.back()) / g10;
    Spectrum spec;
    double gw = 0.0;  // window decay rate
    if (window == SpectrumWindow::none) {
        if (tail > 1e-2) {
            std::ostringstream os;
            os << "power_spectrum: trace tail " << tail
               << " of peak has not decayed; use the exponential-tail window";
            throw NumericalError(os.str());
        }
        if (tail > 1e-4) {
            std::ostringstream os;
            os << "trace truncated at |g1(t_max)|/g1(0) = " << tail;
            spec.truncation_warning = os.str();
        }
    } else {
        if (tail > 1e-4) {
            gw = std::log(tail / 1e-4) / trace.t_max();
            spec.window_fwhm_hz = gw / pi;  // Lorentzian FWHM of exp(-gw |t|)
        }
    }

    const std::size_t m = 2 * (n - 1) * static_cast<std::size_t>(pad_factor);
    std::vector<std::complex<double>> buf(m, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        const std::complex<double> v =
            trace.g1[k] * std::exp(-gw * trace.times[k]);
        buf[k] = v;
        if (k > 0) buf[m - k] = std::conj(v);
    }
    std::vector<std::complex<double>> out(m);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_plan plan = fftw_plan_dft_1d(
            static_cast<int>(m), reinterpret_cast<fftw_complex*>(buf.data()),
            reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    // S(omega_k) = dt * sum g1(t) e^{-i omega t}; shift to ascending frequency
    spec.df_hz = 1.0 / (static_cast<double>(m) * dt);
    spec.freqs_hz.resize(m);
    spec.psd.resize(m);
    const std::size_t half = m / 2;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t src = (k + half) % m;
        const double fidx = static_cast<double>(k) - static_cast<double>(half);
        spec.freqs_hz[k] = fidx * spec.df_hz;
        spec.psd[k] = out[src].real() * dt;
    }
    return spec;
}

LorentzianFit fit_lorentzian(const Spectrum& spec,
                             const std::optional<LorentzianGuess>& init) {
    const std::size_t m = spec.psd.size();
    if (m < 16) throw ConfigError("fit: spectrum too short");
    std::size_t ipk = 0;
    for (std::size_t k = 1; k < m; ++k)
        if (spec.psd[k] > spec.psd[ipk]) ipk = k;
    const double pk = spec.psd[ipk];
    if (!(pk > 0.0)) throw NumericalError("fit: non-positive spectrum peak");

    // half-maximum region resolution check
    std::size_t lo = ipk, hi = ipk;
    while (lo > 0 && spec.psd[lo - 1] >= 0.5 * pk) --lo;
    while (hi + 1 < m && spec.psd[hi + 1] >= 0.5 * pk) ++hi;
    const std::size_t n_half = hi - lo + 1;
    if (n_half < 16) {
        std::ostringstream os;
        os << "fit: only " << n_half
           << " grid points across the half-maximum region (need >= 16); "
              "increase pad_factor or t_max";
        throw NumericalError(os.str());
    }

    double A, nu0, sig;
    if (init) {
        A = init->amplitude;
        nu0 = init->center_hz;
        sig = init->hwhm_hz;
    } else {
        nu0 = spec.freqs_hz[ipk];
        sig = 0.5 * static_cast<double>(n_half) * spec.df_hz;
        A = pk * pi * sig;
    }

    // fit window: +-20 half-width estimates around the peak
    const double w = 20.0 * sig;
    std::size_t wlo = ipk, whi = ipk;
    while (wlo > 0 && spec.freqs_hz[wlo - 1] >= nu0 - w) --wlo;
    while (whi + 1 < m && spec.freqs_hz[whi + 1] <= nu0 + w) ++whi;

    // Levenberg-Marquardt with analytic Jacobian
    auto chi2_of = [&](double A_, double nu0_, double sig_) {
        double c = 0.0;
        for (std::size_t k = wlo; k <= whi; ++k) {
            const double x = spec.freqs_hz[k] - nu0_;
            const double den = x * x + sig_ * sig_;
            const double r = (A_ / pi) * sig_ / den - spec.psd[k];
            c += r * r;
        }
        return c;
    };
    double lambda = 1e-3;
    double chi2 = chi2_of(A, nu0, sig);
    int iter = 0;
    for (; iter < 200; ++iter) {
        double JtJ[3][3] = {};
        double Jtr[3] = {};
        for (std::size_t k = wlo; k <= whi; ++k) {
            const double x = spec.freqs_hz[k] - nu0;
            const double den = x * x + sig * sig;
            const double f = (A / pi) * sig / den;
            const double r = f - spec.psd[k];
            const double dA = f / A;
            const double dnu0 = (A / pi) * sig * 2.0 * x / (den * den);
            const double dsig = (A / pi) * (x * x - sig * sig) / (den * den);
            const double grad[3] = {dA, dnu0, dsig};
            for (int a = 0; a < 3; ++a) {
                Jtr[a] += grad[a] * r;
                for (int b = 0; b < 3; ++b) JtJ[a][b] += grad[a] * grad[b];
            }
        }
        // solve (JtJ + lambda diag) step = -Jtr via Cramer on 3x3
        double Mx[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                Mx[a][b] = JtJ[a][b] + (a == b ? lambda * JtJ[a][a] : 0.0);
        auto det3 = [](double M3[3][3]) {
            return M3[0][0] * (M3[1][1] * M3[2][2] - M3[1][2] * M3[2][1]) -
                   M3[0][1] * (M3[1][0] * M3[2][2] - M3[1][2] * M3[2][0]) +
                   M3[0][2] * (M3[1][0] * M3[2][1] - M3[1][1] * M3[2][0]);
        };
        const double d0 = det3(Mx);
        if (d0 == 0.0) break;
        double step[3];
        for (int col = 0; col < 3; ++col) {
            double Mc[3][3];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) Mc[a][b] = Mx[a][b];
            for (int a = 0; a < 3; ++a) Mc[a][col] = -Jtr[a];
            step[col] = det3(Mc) / d0;
        }
        const double At = A + step[0], nu0t = nu0 + step[1], sigt = sig + step[2];
        const double chi2t = (sigt > 0.0 && At > 0.0)
                                 ? chi2_of(At, nu0t, sigt)
                                 : std::numeric_limits<double>::infinity();
        if (chi2t < chi2) {
            const double rel = std::max({std::abs(step[0]) / std::max(1e-300, std::abs(A)),
                                         std::abs(step[1]) / std::max(sig, 1e-300),
                                         std::abs(step[2]) / std::max(sig, 1e-300)});
            A = At;
            nu0 = nu0t;
            sig = sigt;
            chi2 = chi2t;
            lambda = std::max(lambda * 0.3, 1e-14);
            if (rel < 1e-10) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e14) break;
        }
    }
    if (iter >= 200 || !(sig > 0.0)) {
        std::ostringstream os;
        os << "fit: no convergence; best so far A = " << A << ", nu0 = " << nu0
           << ", sigma = " << sig << ", rms residual = "
           << std::sqrt(chi2 / static_cast<double>(whi - wlo + 1));
        throw NumericalError(os.str());
    }
    LorentzianFit fit;
    fit.amplitude = A;
    fit.center_hz = nu0;
    fit.hwhm_hz = sig;
    fit.fwhm_hz = 2.0 * sig;
    fit.iterations = iter + 1;
    const double peak_fit = (A / pi) / sig;
    fit.rms_residual_rel =
        std::sqrt(chi2 / static_cast<double>(whi - wlo + 1)) / std::max(peak_fit, 1e-300);
    return fit;
}

LinewidthResult linewidth(const PhysicalParams& p, const LinewidthOptions& opt) {
    if (p.kappa <= 0.0) {
        throw NumericalError("linewidth: kappa must be positive (undamped field)");
    }
    LinewidthResult out;
    out.steady = opt.steady_override ? *opt.steady_override
                                     : steady_state(p, SteadyMethod::rootfind, opt.steady);
    if (out.steady.n_photon <= 0.0) {
        throw NumericalError("linewidth: steady photon number is zero");
    }
    out.modes = regression_modes(p, out.steady);
    const double ls = -out.modes.lambda_slow.real();
    const double lf = -out.modes.lambda_fast.real();
    if (!(ls > 0.0)) {
        throw NumericalError("linewidth: non-decaying regression mode (unstable point)");
    }

    double t_max, dt;
    std::size_t budget = opt.max_samples;
    if (opt.faithful_fig3) {
        dt = 1e-8;      // 100 MHz sampling
        t_max = 1.0;    // 1 s emission record
        budget = static_cast<std::size_t>(t_max / dt) + 1;
    } else {
        // horizon for |g1| to reach decay_target of g1(0): each mode must decay
        // to half the target or carry no weight to begin with
        const double n0 = out.steady.n_photon;
        const double as = std::abs(out.modes.amp_slow);
        const double af = std::abs(out.modes.amp_fast);
        t_max = std::log(std::max(2.0 * as / (opt.decay_target * n0), 1.0001)) / ls;
        if (lf > 0.0) {
            t_max = std::max(t_max, std::log(std::max(2.0 * af / (opt.decay_target * n0),
                                                      1.0001)) / lf);
        }
        const double dt_fast = 0.1 / std::max(p.kappa, lf);
        dt = dt_fast;
        if (t_max / dt > static_cast<double>(budget)) {
            dt = t_max / static_cast<double>(budget);
        }
    }
    RegressionOptions ropt;
    if (opt.steady_override) ropt.steady_residual_tol = std::numeric_limits<double>::infinity();
    CorrelationTrace trace = regression_correlation(out.steady, p, t_max, dt, ropt);

    const double tail = std::abs(trace.g1.back()) / std::abs(trace.g1.front());
    const SpectrumWindow win =
        tail > opt.decay_target ? SpectrumWindow::exponential_tail : SpectrumWindow::none;
    Spectrum spec = power_spectrum(trace, win, opt.pad_factor);
    out.window_fwhm_hz = spec.window_fwhm_hz;

    out.fit = fit_lorentzian(spec);
    out.fwhm_hz = out.fit.fwhm_hz - spec.window_fwhm_hz;
    if (out.fwhm_hz <= 0.0) {
        throw NumericalError("linewidth: tail window dominates the fitted width");
    }
    out.dt = dt;
    out.t_max = t_max;
    out.n_samples = trace.g1.size();
    if (opt.keep_trace) out.trace = std::move(trace);
    if (opt.keep_spectrum) out.spectrum = std::move(spec);
    return out;
}

}  // namespace srl
