#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "srl/meanfield.hpp"

namespace srl {

/// First-order field correlation <a^dag(t) a(0)> on a uniform grid.
struct CorrelationTrace {
    std::vector<double> times;               // s, step dt, starting at 0
    std::vector<std::complex<double>> g1;    // same length
    PhysicalParams params;
    MeanFieldState steady;

    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    double t_max() const { return times.empty() ? 0.0 : times.back(); }
};

enum class SpectrumWindow {
    none,
    exponential_tail,  ///< multiply by a decaying exponential chosen to push the
                       ///< tail to 1e-4 of the peak; its Lorentzian FWHM is
                       ///< recorded so fits can be compensated
};

struct Spectrum {
    std::vector<double> freqs_hz;  // symmetric about 0 (offset from carrier)
    std::vector<double> psd;       // real, arbitrary units
    double df_hz = 0.0;
    double window_fwhm_hz = 0.0;   // 0 when no window was applied
    std::string truncation_warning;  // empty when the trace decayed cleanly
};

struct LorentzianFit {
    double amplitude = 0.0;   // A in  F = (A/pi) sigma / ((nu-nu0)^2 + sigma^2)
    double center_hz = 0.0;   // nu0
    double hwhm_hz = 0.0;     // sigma
    double fwhm_hz = 0.0;     // 2 sigma
    double rms_residual_rel = 0.0;  // relative to the fitted peak height
    int iterations = 0;
};

/// The 2x2 linear system of the quantum-regression step for
/// (C_a, C_sigma) = (<a^dag(t)a(0)>, <sigma_1^+(t)a(0)>), with <sigma_z>
/// frozen at its steady-state value. Kept as an isolated, swappable piece.
struct RegressionMatrix {
    std::complex<double> aa, as, sa, ss;  // d/dt (Ca, Cs) = [[aa, as],[sa, ss]] (Ca, Cs)
};

RegressionMatrix regression_matrix(const PhysicalParams& p, double inversion_ss);

/// Decay modes of the regression matrix with the amplitudes obtained by
/// projecting the steady-state initial condition (n_ss, conj(coherence_ss)).
struct RegressionModes {
    std::complex<double> lambda_slow, lambda_fast;  // ordered by |Re|
    std::complex<double> amp_slow, amp_fast;        // C_a components
};

RegressionModes regression_modes(const PhysicalParams& p, const MeanFieldState& steady);

struct RegressionOptions {
    double rtol = 1e-10;
    std::size_t max_steps = 4'000'000;
    double steady_residual_tol = 1e-6;  // times rate scale
};

/// Evolves the regression vector from the steady state over a uniform grid.
/// dt must resolve the fastest regression mode (dt <= 0.1/kappa) unless the
/// spectral weight of every under-resolved mode is negligible (< 1e-6 of the
/// dominant mode), which is the regime where the fast pole has already decayed
/// within the first sample.
CorrelationTrace regression_correlation(const MeanFieldState& steady,
                                        const PhysicalParams& p, double t_max, double dt,
                                        const RegressionOptions& opt = {});

/// Discrete Fourier transform of the Hermitian extension g1(-t) = conj(g1(t)),
/// zero-padded by pad_factor. Frequency resolution is 1/(2 t_max pad_factor).
Spectrum power_spectrum(const CorrelationTrace& trace,
                        SpectrumWindow window = SpectrumWindow::none, int pad_factor = 8);

struct LorentzianGuess {
    double amplitude, center_hz, hwhm_hz;
};

/// Nonlinear least squares over (A, nu0, sigma) on a +-20 half-width window
/// around the peak. Requires >= 16 grid points across the half-maximum region.
LorentzianFit fit_lorentzian(const Spectrum& spec,
                             const std::optional<LorentzianGuess>& init = std::nullopt);

struct LinewidthOptions {
    SteadyOptions steady;
    std::size_t max_samples = 1 << 18;  // correlation grid budget
    int pad_factor = 8;
    double decay_target = 1e-4;         // |g1(t_max)| / g1(0)
    bool keep_trace = false;
    bool keep_spectrum = false;
    // Literal reproduction of the fixed-grid sampling mode: 100 MHz rate, 1 s
    // duration. Only sensible with the memory budget for 1e8 samples.
    bool faithful_fig3 = false;
    // Injected initial condition for the regression stage, bypassing the
    // steady-state solve and its residual check. Used by analytic oracles
    // (e.g. the decoupled g = 0 field decay, which has no lasing steady state).
    std::optional<MeanFieldState> steady_override;
};

struct LinewidthResult {
    double fwhm_hz = 0.0;
    LorentzianFit fit;
    MeanFieldState steady;
    RegressionModes modes;
    double dt = 0.0, t_max = 0.0;
    std::size_t n_samples = 0;
    double window_fwhm_hz = 0.0;
    std::optional<CorrelationTrace> trace;
    std::optional<Spectrum> spectrum;
};

/// End-to-end pipeline: steady_state -> regression_correlation ->
/// power_spectrum -> fit_lorentzian. The fitted FWHM is compensated for the
/// tail window when one was applied.
LinewidthResult linewidth(const PhysicalParams& p, const LinewidthOptions& opt = {});

}  // namespace srl
