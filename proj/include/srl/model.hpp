#pragma once

#include <limits>
#include <optional>
#include <string>

#include "srl/errors.hpp"
#include "srl/units.hpp"

namespace srl {

/// The rate set defining one simulation instance. All rates are angular
/// (rad/s); use from_ordinary_hz() to enter figure-caption style values.
/// Values are immutable after construction.
struct PhysicalParams {
    double gamma = 0.0;    ///< atomic population decay rate
    double kappa = 0.0;    ///< cavity energy loss rate
    double g = 0.0;        ///< single atom-photon coupling
    double chi = 0.0;      ///< inhomogeneous dephasing rate 1/T2*
    double eta = 0.0;      ///< incoherent pump rate
    double delta = 0.0;    ///< cavity-atom detuning omega_c - omega_a
    double n_atoms = 0.0;  ///< atom count N (real-valued; N ~ 1e11 is in range)

    static PhysicalParams angular(double gamma, double kappa, double g, double chi,
                                  double eta, double delta, double n_atoms);
    static PhysicalParams from_ordinary_hz(double gamma, double kappa, double g,
                                           double chi, double eta, double delta,
                                           double n_atoms);
    void validate() const;
};

struct CavityGeometry {
    double length_m = 0.0;  ///< cavity length L
    double r1 = 1.0;        ///< mirror power reflectivity, (0, 1]
    double r2 = 1.0;

    static CavityGeometry make(double length_m, double r1, double r2);
};

/// Material and spectroscopy inputs for the ion-count estimate. Densities and
/// volumes are in ions/um^3 and um^3; linewidths in ordinary Hz.
struct MaterialParams {
    double host_ion_density = 0.0;   ///< D_h, ions per um^3
    double doping_fraction = 0.0;    ///< C_d
    double gamma_h_hz = 0.0;         ///< homogeneous linewidth
    double gamma_inh_hz = 0.0;       ///< inhomogeneous linewidth
    double excitation_volume = 0.0;  ///< V_ex, um^3
    std::optional<double> t1_s;
    std::optional<double> t2_s;
    std::optional<double> dipole_moment_cm;  ///< C m
    std::optional<double> finesse;
    std::optional<double> cross_section_m2;
    std::optional<double> beam_area_m2;

    void validate() const;
};

/// Closed-form figures of merit derived from a PhysicalParams set.
struct DerivedQuantities {
    double c1 = 0.0;         ///< single-atom cooperativity g^2/(gamma kappa)
    double n_c = 0.0;        ///< cavity-QED critical atom number gamma kappa/g^2
    double m_c = 0.0;        ///< saturation photon number gamma^2/g^2
    double n_crit = 0.0;     ///< superradiance critical atom number 2 chi/(C1 gamma)
    double n_g = 0.0;        ///< group refractive index (2 gamma + kappa)/(2 gamma)
    double pulling = 0.0;    ///< frequency pulling coefficient P = 1/n_g
    double nc1gamma = 0.0;   ///< collective decay scale N C1 gamma, rad/s
};

/// Cold-cavity loss rate -(c/2L) ln(R1 R2), angular (rad/s).
double cold_cavity_loss(const CavityGeometry& geom);

/// All derived quantities; requires gamma > 0 and kappa > 0 (degenerate-rate
/// error otherwise). g == 0 yields the C1 = 0 / infinite-N_c limits.
DerivedQuantities derive(const PhysicalParams& p);

/// (2 gamma + kappa)/(2 gamma); >= 1. Throws on gamma == 0.
double group_index(double gamma, double kappa);

// Linewidth formulas. Rates enter as angular (rad/s) and the FWHM results are
// reported in ordinary Hz: each formula is evaluated in angular units and
// divided by 2 pi at the end. Output metadata of the CLI repeats this note.

/// Quantum-limited linewidth of a good-cavity laser.
/// nu in Hz, kappa angular, p_out in W.
double linewidth_schawlow_townes(double nu_hz, double kappa, double p_out_w);

/// Bad-cavity (Haken) linewidth with group-index dressing, spontaneous
/// emission factor N_e/(N_e - N_g) and the detuning bracket.
double linewidth_bad_cavity_haken(double nu_hz, double nu0_hz, double kappa,
                                  double gamma, double p_out_w, double n_excited,
                                  double n_ground);

/// Bad-cavity linewidth via intracavity photon number: gamma^2/(pi kappa M_c).
double linewidth_bad_cavity_photon(double gamma, double kappa, double m_c);

/// Bad-cavity linewidth via cooperativity: C1 gamma / pi.
double linewidth_cooperativity(double c1, double gamma);

/// Ion count within the homogeneous channel of the excitation volume:
/// D_h * C_d * (Gamma_h/Gamma_inh) * V_ex.
double ion_number_estimate(const MaterialParams& mat);

}  // namespace srl
