#include "homjump/lindblad.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace homjump {

namespace {

// Column-stacking vec: vec(A rho B) = (B^T kron A) vec(rho).
CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix liouvillian(const SystemModel& model) {
  const CMatrix& h = model.hamiltonian_hermitian().entries();
  const auto d = h.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  const Complex minus_i{0.0, -1.0};
  CMatrix l = minus_i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : model.channels()) {
    const CMatrix& j = c.op.entries();
    const CMatrix jdj = j.adjoint() * j;
    l += kron(j.conjugate(), j) - 0.5 * kron(id, jdj) - 0.5 * kron(jdj.transpose(), id);
  }
  return l;
}

// One classical RK4 step of the linear system x' = L x is x -> P x with
// P = I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24.
CMatrix rk4_step_matrix(const CMatrix& l, double h) {
  const CMatrix hl = h * l;
  const CMatrix id = CMatrix::Identity(l.rows(), l.cols());
  CMatrix term = id;
  CMatrix p = id;
  for (int k = 1; k <= 4; ++k) {
    term = (term * hl) / static_cast<double>(k);
    p += term;
  }
  return p;
}

CMatrix matrix_power(CMatrix base, std::size_t n) {
  CMatrix result = CMatrix::Identity(base.rows(), base.cols());
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace

double max_rate(const SystemModel& model) {
  return model.h_nonhermitian().entries().cwiseAbs().rowwise().sum().maxCoeff();
}

std::vector<CMatrix> lindblad_oracle(const SystemModel& model, std::span<const double> t_grid) {
  if (t_grid.empty()) return {};
  if (!(t_grid[0] >= 0.0)) {
    throw std::invalid_argument("lindblad_oracle: grid must start at t >= 0");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("lindblad_oracle: grid must be increasing");
    }
  }
  const double rate = max_rate(model);
  const double h_max = rate > 0.0 ? 1e-3 / rate : 1e-3;

  const CVector& psi0 = model.initial_state().amplitudes();
  const auto d = psi0.size();
  const CMatrix rho0 = psi0 * psi0.adjoint();
  const CMatrix l = liouvillian(model);

  CVector x = Eigen::Map<const CVector>(rho0.data(), d * d);
  std::vector<CMatrix> out;
  out.reserve(t_grid.size());

  // Intervals of equal length reuse the same composed step matrix.
  std::map<std::pair<std::size_t, double>, CMatrix> cache;
  double now = 0.0;
  for (const double target : t_grid) {
    const double span = target - now;
    if (span > 0.0) {
      const auto steps = static_cast<std::size_t>(std::ceil(span / h_max - 1e-9));
      const double h = span / static_cast<double>(steps);
      const auto key = std::make_pair(steps, h);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(key, matrix_power(rk4_step_matrix(l, h), steps)).first;
      }
      x = it->second * x;
      now = target;
    }
    CMatrix rho = Eigen::Map<const CMatrix>(x.data(), d, d);
    const double drift = std::abs(rho.trace() - Complex{1.0});
    if (!(drift <= 1e-6)) {
      throw NumericalFailure("lindblad_oracle: trace drift " + std::to_string(drift) + " at t = " +
                             std::to_string(target));
    }
    out.push_back(std::move(rho));
  }
  return out;
}

}  // namespace homjump
