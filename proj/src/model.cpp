#include "srl/model.hpp"

#include <cmath>

namespace srl {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw ConfigError(std::string(name) + " must be finite");
    }
}

void require_nonneg(double v, const char* name) {
    require_finite(v, name);
    if (v < 0.0) {
        throw ConfigError(std::string(name) + " must be >= 0, got " + std::to_string(v));
    }
}

}  // namespace

PhysicalParams PhysicalParams::angular(double gamma, double kappa, double g, double chi,
                                       double eta, double delta, double n_atoms) {
    PhysicalParams p{gamma, kappa, g, chi, eta, delta, n_atoms};
    p.validate();
    return p;
}

PhysicalParams PhysicalParams::from_ordinary_hz(double gamma, double kappa, double g,
                                                double chi, double eta, double delta,
                                                double n_atoms) {
    return angular(hz_to_angular(gamma), hz_to_angular(kappa), hz_to_angular(g),
                   hz_to_angular(chi), hz_to_angular(eta), hz_to_angular(delta), n_atoms);
}

void PhysicalParams::validate() const {
    require_nonneg(gamma, "gamma");
    require_nonneg(kappa, "kappa");
    require_nonneg(g, "g");
    require_nonneg(chi, "chi");
    require_nonneg(eta, "eta");
    require_finite(delta, "delta");
    require_nonneg(n_atoms, "n_atoms");
}

CavityGeometry CavityGeometry::make(double length_m, double r1, double r2) {
    require_finite(length_m, "length_m");
    if (length_m <= 0.0) throw ConfigError("cavity length must be > 0");
    for (auto [r, name] : {std::pair{r1, "R1"}, std::pair{r2, "R2"}}) {
        require_finite(r, name);
        if (r <= 0.0 || r > 1.0) {
            throw ConfigError(std::string(name) + " must be in (0, 1]");
        }
    }
    return CavityGeometry{length_m, r1, r2};
}

void MaterialParams::validate() const {
    require_nonneg(host_ion_density, "host_ion_density");
    require_nonneg(doping_fraction, "doping_fraction");
    require_nonneg(gamma_h_hz, "gamma_h_hz");
    require_nonneg(gamma_inh_hz, "gamma_inh_hz");
    require_nonneg(excitation_volume, "excitation_volume");
    if (gamma_inh_hz > 0.0 && gamma_h_hz > gamma_inh_hz) {
        throw ConfigError("Gamma_h must not exceed Gamma_inh");
    }
    for (const auto& [opt, name] :
         {std::pair{t1_s, "T1"}, std::pair{t2_s, "T2"},
          std::pair{dipole_moment_cm, "dipole_moment"}, std::pair{finesse, "finesse"},
          std::pair{cross_section_m2, "cross_section"}, std::pair{beam_area_m2, "beam_area"}}) {
        if (opt && (!std::isfinite(*opt) || *opt <= 0.0)) {
            throw ConfigError(std::string(name) + " must be positive when present");
        }
    }
}

double cold_cavity_loss(const CavityGeometry& geom) {
    return -(speed_of_light / (2.0 * geom.length_m)) * std::log(geom.r1 * geom.r2);
}

DerivedQuantities derive(const PhysicalParams& p) {
    p.validate();
    if (p.gamma <= 0.0 || p.kappa <= 0.0) {
        throw NumericalError("derive: gamma and kappa must be positive (degenerate rate)");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    DerivedQuantities d;
    d.c1 = p.g * p.g / (p.gamma * p.kappa);
    d.n_c = p.g > 0.0 ? p.gamma * p.kappa / (p.g * p.g) : inf;
    d.m_c = p.g > 0.0 ? p.gamma * p.gamma / (p.g * p.g) : inf;
    const double c1gamma = d.c1 * p.gamma;
    if (p.chi == 0.0) {
        d.n_crit = 0.0;  // any N suffices
    } else if (c1gamma == 0.0) {
        d.n_crit = inf;
    } else {
        d.n_crit = 2.0 * p.chi / c1gamma;
    }
    d.n_g = group_index(p.gamma, p.kappa);
    d.pulling = 2.0 * p.gamma / (2.0 * p.gamma + p.kappa);
    d.nc1gamma = p.n_atoms * c1gamma;
    return d;
}

double group_index(double gamma, double kappa) {
    if (gamma <= 0.0) throw NumericalError("group_index: gamma must be positive");
    return (2.0 * gamma + kappa) / (2.0 * gamma);
}

double linewidth_schawlow_townes(double nu_hz, double kappa, double p_out_w) {
    if (p_out_w <= 0.0) throw NumericalError("linewidth: output power must be positive");
    const double fwhm_angular = planck_h * nu_hz * kappa * kappa / (4.0 * pi * p_out_w);
    return fwhm_angular / two_pi;
}

double linewidth_bad_cavity_haken(double nu_hz, double nu0_hz, double kappa,
                                  double gamma, double p_out_w, double n_excited,
                                  double n_ground) {
    if (p_out_w <= 0.0) throw NumericalError("linewidth: output power must be positive");
    if (n_excited <= n_ground) {
        throw NumericalError("linewidth: population not inverted (N_e <= N_g)");
    }
    const double n_sp = n_excited / (n_excited - n_ground);
    const double ng = group_index(gamma, kappa);
    const double kd = kappa / ng;
    const double det = two_pi * (nu_hz - nu0_hz) / (gamma + 0.5 * kappa);
    const double bracket = 1.0 + det * det;
    const double fwhm_angular =
        planck_h * nu_hz * kd * kd / (4.0 * pi * p_out_w) * n_sp * bracket;
    return fwhm_angular / two_pi;
}

double linewidth_bad_cavity_photon(double gamma, double kappa, double m_c) {
    if (kappa <= 0.0 || m_c <= 0.0) {
        throw NumericalError("linewidth: kappa and M_c must be positive");
    }
    return gamma * gamma / (pi * kappa * m_c) / two_pi;
}

double linewidth_cooperativity(double c1, double gamma) {
    if (c1 < 0.0 || gamma < 0.0) {
        throw NumericalError("linewidth: C1 and gamma must be non-negative");
    }
    return c1 * gamma / pi / two_pi;
}

double ion_number_estimate(const MaterialParams& mat) {
    mat.validate();
    if (mat.gamma_inh_hz == 0.0) {
        return 0.0;
    }
    return mat.host_ion_density * mat.doping_fraction *
           (mat.gamma_h_hz / mat.gamma_inh_hz) * mat.excitation_volume;
}

}  // namespace srl
