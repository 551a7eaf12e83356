#include "srl/meanfield.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail/stiff.hpp"

namespace srl {

namespace {

// Real 6-component layout used by the integrator and the Newton solver:
// y = [n / S, Re c, Im c, s, Re w, Im w], with S the photon scale.
struct Sys {
    PhysicalParams p;
    double S = 1.0;

    void rhs(const double* y, double* dy) const {
        const double n = y[0] * S, cr = y[1], ci = y[2], s = y[3], wr = y[4], wi = y[5];
        const double dc = (p.eta + p.gamma + p.kappa) / 2.0 + p.chi;
        const double gw = p.gamma + p.eta + 2.0 * p.chi;
        const double br = s * n + (s + 1.0) / 2.0 + (p.n_atoms - 1.0) * wr;
        const double bi = (p.n_atoms - 1.0) * wi;
        dy[0] = (-p.kappa * n + p.g * p.n_atoms * ci) / S;
        dy[1] = -dc * cr - p.delta * ci - 0.5 * p.g * bi;
        dy[2] = p.delta * cr - dc * ci + 0.5 * p.g * br;
        dy[3] = -2.0 * p.g * ci - p.gamma * (1.0 + s) + p.eta * (1.0 - s);
        dy[4] = -gw * wr + p.g * s * ci;
        dy[5] = -gw * wi;
    }

    void jac(const double* y, double* J) const {  // row-major 6x6
        const double n = y[0] * S, ci = y[2], s = y[3];
        const double dc = (p.eta + p.gamma + p.kappa) / 2.0 + p.chi;
        const double gw = p.gamma + p.eta + 2.0 * p.chi;
        const double Nm1 = p.n_atoms - 1.0;
        std::fill(J, J + 36, 0.0);
        J[0 * 6 + 0] = -p.kappa;
        J[0 * 6 + 2] = p.g * p.n_atoms / S;
        J[1 * 6 + 1] = -dc;
        J[1 * 6 + 2] = -p.delta;
        J[1 * 6 + 5] = -0.5 * p.g * Nm1;
        J[2 * 6 + 0] = 0.5 * p.g * s * S;
        J[2 * 6 + 1] = p.delta;
        J[2 * 6 + 2] = -dc;
        J[2 * 6 + 3] = 0.5 * p.g * (n + 0.5);
        J[2 * 6 + 4] = 0.5 * p.g * Nm1;
        J[3 * 6 + 2] = -2.0 * p.g;
        J[3 * 6 + 3] = -(p.gamma + p.eta);
        J[4 * 6 + 2] = p.g * s;
        J[4 * 6 + 3] = p.g * ci;
        J[4 * 6 + 4] = -gw;
        J[5 * 6 + 5] = -gw;
    }

    detail::StiffSystem system() const {
        return detail::StiffSystem{
            [this](const double* y, double* dy) { rhs(y, dy); },
            [this](const double* y, double* J) { jac(y, J); }, 6};
    }
};

std::vector<double> pack(const MeanFieldState& s, double S) {
    return {s.n_photon / S, s.coherence.real(), s.coherence.imag(),
            s.inversion,    s.spin_corr.real(), s.spin_corr.imag()};
}

MeanFieldState unpack(const std::vector<double>& y, double S) {
    MeanFieldState s;
    s.n_photon = y[0] * S;
    s.coherence = {y[1], y[2]};
    s.inversion = y[3];
    s.spin_corr = {y[4], y[5]};
    return s;
}

void check_physicality(const MeanFieldState& s, double S, double t) {
    if (s.inversion < -1.0 - 1e-6 || s.inversion > 1.0 + 1e-6) {
        std::ostringstream os;
        os << "evolve: inversion " << s.inversion << " left [-1,1] at t = " << t;
        throw NumericalError(os.str());
    }
    if (s.n_photon < -std::max(1e-10, 1e-10 * S)) {
        std::ostringstream os;
        os << "evolve: photon number " << s.n_photon << " negative at t = " << t;
        throw NumericalError(os.str());
    }
}

Eigen::Matrix<double, 6, 6> jacobian_matrix(const Sys& sys, const std::vector<double>& y) {
    double J[36];
    sys.jac(y.data(), J);
    Eigen::Matrix<double, 6, 6> M;
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 6; ++k) M(i, k) = J[i * 6 + k];
    return M;
}

double max_real_eigenvalue(const Eigen::Matrix<double, 6, 6>& M) {
    Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(M, false);
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 6; ++i) mx = std::max(mx, es.eigenvalues()[i].real());
    return mx;
}

}  // namespace

MeanFieldState rhs(const MeanFieldState& s, const PhysicalParams& p) {
    Sys sys{p, 1.0};
    const std::vector<double> y = pack(s, 1.0);
    std::vector<double> dy(6);
    sys.rhs(y.data(), dy.data());
    return unpack(dy, 1.0);
}

double rate_scale(const PhysicalParams& p) {
    return std::max({p.kappa, p.gamma, p.eta, 2.0 * p.chi, p.g, std::abs(p.delta), 1.0});
}

double photon_scale(const PhysicalParams& p, double n_hint) {
    double S = std::max(1.0, std::abs(n_hint));
    if (p.kappa > 0.0 && p.g > 0.0 && p.n_atoms > 0.0) {
        // |coherence| <= sqrt(n) bounds the steady photon number by (gN/kappa)^2
        const double cap = p.g * p.n_atoms / p.kappa;
        S = std::max(S, std::min(cap * cap, 1e30));
    }
    return S;
}

double steady_residual(const MeanFieldState& s, const PhysicalParams& p) {
    // photon component normalized by the state's own occupation
    const double S = std::max(1.0, std::abs(s.n_photon));
    const MeanFieldState d = rhs(s, p);
    double r = std::abs(d.n_photon) / S;
    r = std::max(r, std::abs(d.coherence.real()));
    r = std::max(r, std::abs(d.coherence.imag()));
    r = std::max(r, std::abs(d.inversion));
    r = std::max(r, std::abs(d.spin_corr.real()));
    r = std::max(r, std::abs(d.spin_corr.imag()));
    return r;
}

Trajectory evolve(const MeanFieldState& initial, const PhysicalParams& p, double t_end,
                  const EvolveOptions& opt) {
    p.validate();
    if (!(t_end > 0.0)) throw ConfigError("evolve: t_end must be positive");
    if (!(opt.rtol > 1e-14 && opt.rtol < 1e-2)) {
        throw ConfigError("evolve: rtol must lie in (1e-14, 1e-2)");
    }
    std::vector<double> times = opt.sample_times;
    if (times.empty()) {
        const std::size_t n = std::max<std::size_t>(2, opt.n_samples);
        times.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            times[i] = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
        times.back() = t_end;  // guard the endpoint against rounding past t_end
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw ConfigError("evolve: sample times must be strictly increasing");
        }
    }
    if (times.back() > t_end * (1.0 + 1e-12)) {
        throw ConfigError("evolve: sample times exceed t_end");
    }

    const double S = photon_scale(p, initial.n_photon);
    Sys sys{p, S};
    std::vector<double> y = pack(initial, S);

    Trajectory traj;
    traj.params = p;
    traj.times.reserve(times.size());
    traj.states.reserve(times.size());
    if (times.front() == 0.0) {
        check_physicality(initial, S, 0.0);
        traj.times.push_back(0.0);
        traj.states.push_back(initial);
    }
    auto on_sample = [&](double t, const std::vector<double>& yi) {
        MeanFieldState st = unpack(yi, S);
        check_physicality(st, S, t);
        traj.times.push_back(t);
        traj.states.push_back(st);
    };
    const double atol = opt.atol > 0.0 ? opt.atol : opt.rtol * 1e-4;
    detail::integrate_stiff(sys.system(), y, 0.0, t_end, opt.rtol, atol, opt.max_steps,
                            times, on_sample);
    return traj;
}

namespace {

// Acceptance test shared by both steady-state methods: small residual at a
// stable, physical point. The below-threshold branch continued past threshold
// fails the stability check; Hopf-unstable (self-pulsing) cells fail too.
bool acceptable_root(const MeanFieldState& st, const PhysicalParams& p, double atol_ss) {
    const double R = rate_scale(p);
    if (steady_residual(st, p) > atol_ss * R) return false;
    if (st.n_photon < -1e-9 * std::max(1.0, st.n_photon)) return false;
    if (std::abs(st.inversion) > 1.0 + 1e-6) return false;
    Sys sys{p, std::max(1.0, std::abs(st.n_photon))};
    const std::vector<double> y = pack(st, sys.S);
    const double mre = max_real_eigenvalue(jacobian_matrix(sys, y));
    return mre <= 1e-9 * R;
}

// Damped Newton on the moment equations from a given seed. Works in photon-
// scaled coordinates; returns the endpoint whether or not it is acceptable.
MeanFieldState newton_polish(const MeanFieldState& seed, const PhysicalParams& p) {
    const double S = std::max(1.0, std::abs(seed.n_photon));
    Sys sys{p, S};
    std::vector<double> y = pack(seed, S);
    std::vector<double> f(6), ytry(6), ftry(6);
    auto norm_of = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };
    sys.rhs(y.data(), f.data());
    double fn = norm_of(f);
    for (int iter = 0; iter < 120; ++iter) {
        Eigen::Matrix<double, 6, 6> M = jacobian_matrix(sys, y);
        Eigen::Matrix<double, 6, 1> b;
        for (int i = 0; i < 6; ++i) b(i) = -f[i];
        Eigen::Matrix<double, 6, 1> dx = M.fullPivLu().solve(b);
        double lam = 1.0;
        double fn_try = fn;
        for (int halve = 0; halve < 50; ++halve) {
            for (int i = 0; i < 6; ++i) ytry[i] = y[i] + lam * dx(i);
            sys.rhs(ytry.data(), ftry.data());
            fn_try = norm_of(ftry);
            if (fn_try < fn || fn_try < 1e-30) break;
            lam *= 0.5;
        }
        if (!(fn_try < fn)) break;
        double step = 0.0;
        for (int i = 0; i < 6; ++i)
            step = std::max(step, std::abs(lam * dx(i)) / std::max(1.0, std::abs(ytry[i])));
        y = ytry;
        f = ftry;
        fn = fn_try;
        if (step < 1e-14) break;
    }
    return unpack(y, S);
}

// Gain-clamped estimate of the lasing branch at delta = 0: the coherence
// equation balances collective gain against its damping, pinning the
// inversion; the pump equation then fixes the emission.
std::optional<MeanFieldState> clamp_seed(const PhysicalParams& p) {
    if (p.g <= 0.0 || p.kappa <= 0.0 || p.n_atoms <= 0.0) return std::nullopt;
    const double dc = (p.eta + p.gamma + p.kappa) / 2.0 + p.chi;
    const double gw = p.gamma + p.eta + 2.0 * p.chi;
    if (gw <= 0.0) return std::nullopt;
    const double s = 2.0 * dc / (p.g * p.g * p.n_atoms * (1.0 / p.kappa + 1.0 / gw));
    if (!std::isfinite(s) || s <= 0.0 || s > 1.0) return std::nullopt;
    const double ci = (p.eta - p.gamma - s * (p.eta + p.gamma)) / (2.0 * p.g);
    if (!(ci > 0.0)) return std::nullopt;
    MeanFieldState st;
    st.n_photon = p.g * p.n_atoms * ci / p.kappa;
    st.coherence = {0.0, ci};
    st.inversion = s;
    st.spin_corr = {p.g * s * ci / gw, 0.0};
    return st;
}

}  // namespace

MeanFieldState steady_state(const PhysicalParams& p, SteadyMethod method,
                            const SteadyOptions& opt) {
    p.validate();
    const double S = photon_scale(p);
    Sys sys{p, S};
    const double R = rate_scale(p);

    if (method == SteadyMethod::relaxation) {
        // Honest integration from the all-zero state until the residual
        // criterion holds at a stable point; the horizon doubles per chunk.
        std::vector<double> y(6, 0.0);
        double t_chunk = 1.0 / R;
        double t_total = 0.0;
        detail::StiffIntegrator drv(sys.system(), opt.relax_rtol, opt.relax_rtol * 1e-6,
                                    opt.max_steps);
        for (std::size_t chunk = 0; chunk < opt.max_chunks; ++chunk) {
            double t = 0.0;
            drv.reset();
            drv.apply(t, t_chunk, y);
            t_total += t_chunk;
            t_chunk *= 2.0;
            MeanFieldState st = unpack(y, S);
            if (acceptable_root(st, p, opt.atol_ss)) return st;
        }
        MeanFieldState st = unpack(y, S);
        std::ostringstream os;
        os << "steady_state: relaxation did not converge; residual = "
           << steady_residual(st, p) << " after t = " << t_total
           << " s (weakly damped or self-pulsing parameters)";
        throw NumericalError(os.str());
    }

    // rootfind: damped Newton over structured seeds. The cheap analytic seeds
    // cover the lasing (gain-clamped) and below-threshold branches; a budgeted
    // relaxation seed is the fallback for anything else. Plain integration is
    // not viable in the spiking-transient regime, so it comes last.
    std::vector<MeanFieldState> seeds;
    if (auto cs = clamp_seed(p)) seeds.push_back(*cs);
    {
        MeanFieldState below;  // below-threshold branch neighborhood
        below.inversion = (p.eta + p.gamma) > 0.0
                              ? (p.eta - p.gamma) / (p.eta + p.gamma)
                              : 0.0;
        seeds.push_back(below);
        MeanFieldState dark;
        dark.inversion = -1.0;
        seeds.push_back(dark);
    }
    for (const auto& seed : seeds) {
        const MeanFieldState root = newton_polish(seed, p);
        if (acceptable_root(root, p, opt.atol_ss)) return root;
    }
    {
        std::vector<double> y(6, 0.0);
        detail::StiffIntegrator drv(sys.system(), 1e-8, 1e-12, 200'000);
        double t_chunk = 1.0 / R;
        try {
            for (int chunk = 0; chunk < 24; ++chunk) {
                double t = 0.0;
                drv.reset();
                drv.apply(t, t_chunk, y);
                t_chunk *= 2.0;
                MeanFieldState st = unpack(y, S);
                if (steady_residual(st, p) < std::sqrt(opt.atol_ss) * R) break;
            }
        } catch (const std::exception&) {
            // budget ran out mid-transient; the endpoint still seeds Newton
        }
        const MeanFieldState root = newton_polish(unpack(y, S), p);
        if (acceptable_root(root, p, opt.atol_ss)) return root;
    }
    throw NumericalError(
        "steady_state: no stable physical root found; the parameters may lie in a "
        "self-pulsing region");
}

}  // namespace srl
