#include "least_squares.hpp"

#include <cmath>
#include <limits>

#include <ceres/ceres.h>
#include <Eigen/SVD>

namespace chargetune::detail {

namespace {

class DynamicCost final : public ceres::CostFunction {
 public:
  explicit DynamicCost(const LsqSpec& spec) : spec_(spec) {
    set_num_residuals(spec.n_residuals);
    mutable_parameter_block_sizes()->push_back(spec.n_params);
  }

  bool Evaluate(double const* const* parameters, double* residuals, double** jacobians) const override {
    spec_.eval(parameters[0], residuals, jacobians ? jacobians[0] : nullptr);
    for (int i = 0; i < spec_.n_residuals; ++i) {
      if (!std::isfinite(residuals[i])) return false;
    }
    return true;
  }

 private:
  const LsqSpec& spec_;
};

}  // namespace

LsqOutcome solve_lsq(const LsqSpec& spec, std::vector<double> start) {
  ceres::Problem::Options popts;
  popts.cost_function_ownership = ceres::TAKE_OWNERSHIP;
  ceres::Problem problem(popts);
  problem.AddResidualBlock(new DynamicCost(spec), nullptr, start.data());
  for (int i = 0; i < spec.n_params; ++i) {
    if (!spec.lower.empty() && std::isfinite(spec.lower[i])) problem.SetParameterLowerBound(start.data(), i, spec.lower[i]);
    if (!spec.upper.empty() && std::isfinite(spec.upper[i])) problem.SetParameterUpperBound(start.data(), i, spec.upper[i]);
  }

  ceres::Solver::Options options;
  options.trust_region_strategy_type = ceres::LEVENBERG_MARQUARDT;
  options.linear_solver_type = ceres::DENSE_QR;
  options.max_num_iterations = spec.max_iterations;
  options.function_tolerance = 1e-15;
  options.gradient_tolerance = 1e-16;
  options.parameter_tolerance = 1e-15;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  options.num_threads = 1;

  ceres::Solver::Summary summary;
  ceres::Solve(options, &problem, &summary);

  LsqOutcome out;
  out.params = std::move(start);
  out.cost = summary.final_cost;
  out.iterations = static_cast<int>(summary.iterations.size());
  out.converged = summary.termination_type == ceres::CONVERGENCE;
  return out;
}

Linearisation linearise(const LsqSpec& spec, const std::vector<double>& p) {
  Linearisation lin;
  lin.r.resize(spec.n_residuals);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> j(spec.n_residuals, spec.n_params);
  spec.eval(p.data(), lin.r.data(), j.data());
  lin.jac = j;
  return lin;
}

void summarise(FitResult& out, const LsqSpec& spec, const LsqOutcome& outcome, int n_data, bool absolute_weights,
               double rank_tolerance) {
  const int np = spec.n_params;
  const Linearisation lin = linearise(spec, outcome.params);

  out.values = outcome.params;
  out.n_data = n_data;
  out.iterations = outcome.iterations;
  out.objective = 0.5 * lin.r.squaredNorm();
  out.residual_norm = lin.r.norm();
  out.gradient_norm = (lin.jac.transpose() * lin.r).cwiseAbs().maxCoeff();
  if (!outcome.converged) out.set(FitFlag::NotConverged);

  out.bound_active.assign(np, false);
  for (int i = 0; i < np; ++i) {
    const double x = outcome.params[i];
    const double scale = 1e-9 * std::max(1.0, std::abs(x));
    const bool at_lo = !spec.lower.empty() && std::isfinite(spec.lower[i]) && x - spec.lower[i] <= scale;
    const bool at_hi = !spec.upper.empty() && std::isfinite(spec.upper[i]) && spec.upper[i] - x <= scale;
    out.bound_active[i] = at_lo || at_hi;
    if (out.bound_active[i]) out.set(FitFlag::BoundActive);
  }

  // Column-equilibrated SVD: rank decision independent of parameter units.
  Eigen::VectorXd col = lin.jac.colwise().norm().transpose();
  for (int i = 0; i < np; ++i) {
    if (!(col(i) > 0.0)) col(i) = 1.0;
  }
  const Eigen::MatrixXd js = lin.jac * col.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(js, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();

  double chi2_scale = 1.0;
  if (!absolute_weights) {
    const int dof = n_data - np;
    chi2_scale = dof > 0 ? 2.0 * out.objective / dof : 0.0;
  }

  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(np, np);
  std::vector<bool> unresolved(np, false);
  const double smax = s.size() ? s(0) : 0.0;
  for (int k = 0; k < s.size(); ++k) {
    if (smax > 0.0 && s(k) > rank_tolerance * smax) {
      pinv += v.col(k) * v.col(k).transpose() / (s(k) * s(k));
    } else {
      out.set(FitFlag::NonIdentifiable);
      for (int i = 0; i < np; ++i) {
        if (std::abs(v(i, k)) > 1e-3) unresolved[i] = true;
      }
    }
  }
  out.covariance = chi2_scale * col.cwiseInverse().asDiagonal() * pinv * col.cwiseInverse().asDiagonal();
  out.std_errors.resize(np);
  for (int i = 0; i < np; ++i) {
    out.std_errors[i] = unresolved[i] ? std::numeric_limits<double>::infinity()
                                      : std::sqrt(std::max(0.0, out.covariance(i, i)));
  }
}

}  // namespace chargetune::detail
