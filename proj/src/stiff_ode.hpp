#pragma once

// Adaptive stiff integration (GSL odeiv2, variable-order BDF with an
// analytic Jacobian). Shared by the NV cycle and the surface network.

#include <functional>
#include <span>
#include <vector>

namespace chargetune::detail {

struct StiffTolerances {
  double relative = 1e-8;
  double absolute = 1e-14;
};

using StiffRhs = std::function<void(const double* x, double* dxdt)>;
// Row-major Jacobian df_i/dx_j.
using StiffJacobian = std::function<void(const double* x, double* jac)>;

/// Integrates the autonomous system x' = f(x) from times.front() and returns
/// the state at every entry of `times` (non-decreasing). Throws SolverError
/// when the integrator fails.
std::vector<std::vector<double>> integrate_stiff(const StiffRhs& rhs, const StiffJacobian& jacobian,
                                                 const std::vector<double>& x0, std::span<const double> times,
                                                 StiffTolerances tol);

}  // namespace chargetune::detail
