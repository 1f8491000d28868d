#pragma once

// The NV cycle is a linear, autonomous system x' = M x, so its trajectory is
// exp(M t) x0 and its steady state spans the null space of M. Both are
// computed here with dense linear algebra, independently of the library's
// BDF integrator and 4x4 solve.

#include <array>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

struct NVRates {
  double k1, k2, k3, k4, g0, g1;
};

// Order: NV-, NV-*, NV0, NV0*.
inline Eigen::Matrix4d nv_generator(const NVRates& p, double I) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  auto flow = [&m](int from, int to, double rate) {
    m(from, from) -= rate;
    m(to, from) += rate;
  };
  flow(0, 1, p.k1 * I);  // excitation
  flow(1, 0, p.g1);      // relaxation
  flow(1, 2, p.k2 * I);  // ionisation -> NV0 + e
  flow(2, 3, p.k3 * I);
  flow(3, 2, p.g0);
  flow(3, 0, p.k4 * I);  // recombination -> NV- + h
  return m;
}

inline std::array<double, 4> nv_propagate(const NVRates& p, double I, const std::array<double, 4>& x0,
                                          double t) {
  const Eigen::Matrix4d e = (nv_generator(p, I) * t).exp();
  const Eigen::Vector4d x = e * Eigen::Vector4d(x0[0], x0[1], x0[2], x0[3]);
  return {x[0], x[1], x[2], x[3]};
}

inline std::array<double, 4> nv_null_space(const NVRates& p, double I, double total) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(nv_generator(p, I), Eigen::ComputeFullV);
  Eigen::Vector4d v = svd.matrixV().col(3);
  v *= total / v.sum();
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace oracle
