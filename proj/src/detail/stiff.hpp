#pragma once

// Driver around GSL's implicit multistep BDF integrator (gsl_odeiv2_step_msbdf)
// for the small stiff systems in this project: 6 real mean-field components,
// 4 real regression components. Jacobians are analytic.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "srl/errors.hpp"

namespace srl::detail {

using RhsFn = std::function<void(const double* y, double* dydt)>;
using JacFn = std::function<void(const double* y, double* jac_row_major)>;

struct StiffSystem {
    RhsFn rhs;
    JacFn jac;
    std::size_t dim = 0;
};

inline int gsl_rhs_cb(double, const double y[], double dydt[], void* params) {
    const auto* s = static_cast<const StiffSystem*>(params);
    s->rhs(y, dydt);
    return GSL_SUCCESS;
}

inline int gsl_jac_cb(double, const double y[], double* dfdy, double dfdt[], void* params) {
    const auto* s = static_cast<const StiffSystem*>(params);
    s->jac(y, dfdy);
    for (std::size_t i = 0; i < s->dim; ++i) dfdt[i] = 0.0;
    return GSL_SUCCESS;
}

inline void gsl_quiet() {
    static const auto once = [] {
        gsl_set_error_handler_off();
        return 0;
    }();
    (void)once;
}

class StiffIntegrator {
  public:
    StiffIntegrator(StiffSystem system, double rtol, double atol, std::size_t max_steps)
        : system_(std::move(system)), max_steps_(max_steps) {
        gsl_quiet();
        sys_.function = &gsl_rhs_cb;
        sys_.jacobian = &gsl_jac_cb;
        sys_.dimension = system_.dim;
        sys_.params = &system_;
        driver_ = gsl_odeiv2_driver_alloc_y_new(&sys_, gsl_odeiv2_step_msbdf, 1e-12, atol,
                                                rtol);
        gsl_odeiv2_driver_set_nmax(driver_, static_cast<unsigned long>(max_steps_));
    }
    StiffIntegrator(const StiffIntegrator&) = delete;
    StiffIntegrator& operator=(const StiffIntegrator&) = delete;
    ~StiffIntegrator() {
        if (driver_) gsl_odeiv2_driver_free(driver_);
    }

    // Advances y (length dim) from t to t_target; t is updated in place.
    void apply(double& t, double t_target, std::vector<double>& y) {
        const int status = gsl_odeiv2_driver_apply(driver_, &t, t_target, y.data());
        if (status == GSL_EMAXITER) {
            throw BudgetError("stiff integrator: step budget exhausted at t = " +
                              std::to_string(t));
        }
        if (status != GSL_SUCCESS) {
            throw NumericalError(std::string("stiff integrator: ") + gsl_strerror(status) +
                                 " at t = " + std::to_string(t));
        }
    }

    void reset(double h_start = 1e-12) {
        gsl_odeiv2_driver_reset_hstart(driver_, h_start);
    }

  private:
    StiffSystem system_;
    gsl_odeiv2_system sys_{};
    gsl_odeiv2_driver* driver_ = nullptr;
    std::size_t max_steps_ = 0;
};

// One-shot integration with samples collected at the given times (ascending,
// all within (t0, t1]). The terminal state is written back to y.
inline void integrate_stiff(const StiffSystem& system, std::vector<double>& y, double t0,
                            double t1, double rtol, double atol, std::size_t max_steps,
                            const std::vector<double>& sample_times = {},
                            const std::function<void(double, const std::vector<double>&)>&
                                on_sample = {}) {
    StiffIntegrator drv(system, rtol, atol, max_steps);
    double t = t0;
    for (double ts : sample_times) {
        if (ts <= t) continue;
        if (ts > t1) break;
        drv.apply(t, ts, y);
        if (on_sample) on_sample(t, y);
    }
    if (t < t1) drv.apply(t, t1, y);
}

}  // namespace srl::detail
