#pragma once

#include <cmath>
#include <random>

#include "homjump/algebra.hpp"

namespace homjump::testing {

// Fixed-step classical RK4 for i dpsi/dt = H psi.
inline CVector rk4_evolve(const CMatrix& h, CVector psi, double t, int steps) {
  const Complex mi{0.0, -1.0};
  const double dt = t / steps;
  for (int k = 0; k < steps; ++k) {
    const CVector k1 = mi * (h * psi);
    const CVector k2 = mi * (h * (psi + 0.5 * dt * k1));
    const CVector k3 = mi * (h * (psi + 0.5 * dt * k2));
    const CVector k4 = mi * (h * (psi + dt * k3));
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

inline CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d;
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {d(rng), d(rng)};
  return m;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace homjump::testing
