#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "srl/model.hpp"

namespace srl {

/// The four coupled moments of the closed mean-field hierarchy.
/// coherence = <a^dag sigma_1^->, spin_corr = <sigma_1^+ sigma_2^->.
struct MeanFieldState {
    double n_photon = 0.0;
    std::complex<double> coherence{0.0, 0.0};
    double inversion = 0.0;
    std::complex<double> spin_corr{0.0, 0.0};

    static MeanFieldState zero() { return {}; }
};

/// Right-hand side of the moment equations. <sigma_1^+ a> enters as the
/// complex conjugate of coherence; higher-order cumulants are dropped.
MeanFieldState rhs(const MeanFieldState& s, const PhysicalParams& p);

struct Trajectory {
    std::vector<double> times;           // s, strictly increasing
    std::vector<MeanFieldState> states;  // same length as times
    PhysicalParams params;
};

struct EvolveOptions {
    double rtol = 1e-8;                 // in (1e-14, 1e-2)
    double atol = 0.0;                  // photon-scaled; 0 selects rtol * 1e-4
    std::size_t n_samples = 200;        // uniform grid when sample_times empty
    std::vector<double> sample_times;   // explicit output times (s)
    std::size_t max_steps = 4'000'000;  // deterministic work budget
};

/// Adaptive implicit integration (Rosenbrock) of the moment equations.
/// The terminal state satisfies the physicality invariants; violations and
/// step-size underflow raise NumericalError reporting the time reached.
Trajectory evolve(const MeanFieldState& initial, const PhysicalParams& p,
                  double t_end, const EvolveOptions& opt = {});

enum class SteadyMethod {
    relaxation,  ///< integrate from the all-zero state until the residual criterion
    rootfind,    ///< relaxation estimate polished by a damped Newton iteration
};

struct SteadyOptions {
    double atol_ss = 1e-10;          // residual norm < atol_ss * rate scale
    double relax_rtol = 1e-9;
    std::size_t max_steps = 20'000'000;
    std::size_t max_chunks = 64;     // relaxation horizon doubles per chunk
};

/// Steady state of the moment equations. Relaxation starts from the all-zero
/// state; rootfind polishes with a damped Newton iteration on the 6 real
/// components. Unstable fixed points (the below-threshold branch continued
/// past threshold) are rejected via the Jacobian spectrum.
MeanFieldState steady_state(const PhysicalParams& p,
                            SteadyMethod method = SteadyMethod::rootfind,
                            const SteadyOptions& opt = {});

/// Scaled residual of a candidate steady state: max_i |rhs_i| / scale_i,
/// with the photon component measured relative to the photon scale.
double steady_residual(const MeanFieldState& s, const PhysicalParams& p);

/// Largest rate entering the moment equations (Jacobian magnitude scale).
double rate_scale(const PhysicalParams& p);

/// Upper bound used to normalize the photon component: (gN/kappa)^2 capped.
double photon_scale(const PhysicalParams& p, double n_hint = 0.0);

}  // namespace srl
