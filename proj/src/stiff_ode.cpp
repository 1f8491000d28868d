#include "stiff_ode.hpp"

#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "chargetune/errors.hpp"

namespace chargetune::detail {

namespace {

struct Context {
  const StiffRhs* rhs;
  const StiffJacobian* jac;
  std::size_t n;
};

int gsl_rhs(double, const double y[], double f[], void* params) {
  const auto* c = static_cast<const Context*>(params);
  (*c->rhs)(y, f);
  return GSL_SUCCESS;
}

int gsl_jac(double, const double y[], double* dfdy, double dfdt[], void* params) {
  const auto* c = static_cast<const Context*>(params);
  (*c->jac)(y, dfdy);
  for (std::size_t i = 0; i < c->n; ++i) dfdt[i] = 0.0;
  return GSL_SUCCESS;
}

struct DriverDeleter {
  void operator()(gsl_odeiv2_driver* d) const { gsl_odeiv2_driver_free(d); }
};

}  // namespace

std::vector<std::vector<double>> integrate_stiff(const StiffRhs& rhs, const StiffJacobian& jacobian,
                                                 const std::vector<double>& x0, std::span<const double> times,
                                                 StiffTolerances tol) {
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  if (times.empty()) return out;

  Context ctx{&rhs, &jacobian, x0.size()};
  gsl_odeiv2_system sys{gsl_rhs, gsl_jac, x0.size(), &ctx};

  const double span = times.back() - times.front();
  const double h0 = span > 0.0 ? span * 1e-9 : 1e-9;
  std::unique_ptr<gsl_odeiv2_driver, DriverDeleter> driver(
      gsl_odeiv2_driver_alloc_y_new(&sys, gsl_odeiv2_step_msbdf, h0, tol.absolute, tol.relative));
  gsl_odeiv2_driver_set_nmax(driver.get(), 0);

  // GSL's default handler aborts; rely on return codes instead.
  static const bool handler_off = (gsl_set_error_handler_off(), true);
  (void)handler_off;

  std::vector<double> x = x0;
  double t = times.front();
  for (double target : times) {
    if (target > t) {
      const int status = gsl_odeiv2_driver_apply(driver.get(), &t, target, x.data());
      if (status != GSL_SUCCESS) {
        throw SolverError(std::string("stiff integrator failed: ") + gsl_strerror(status), 0, 0.0);
      }
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace chargetune::detail
