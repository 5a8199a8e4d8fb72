#pragma once

#include <span>
#include <vector>

#include "homjump/algebra.hpp"
#include "homjump/sources.hpp"

namespace homjump {

/// Upper bound on the model's fastest rate: the max row sum of |H_NH|.
double max_rate(const SystemModel& model);

/// Density matrices rho(t) at each grid time from
///   d rho/dt = -i[H, rho] + sum_c (J_c rho J_c^dag - 1/2 {J_c^dag J_c, rho})
/// with fixed-step classical RK4, step <= 1e-3 / max_rate, starting from the
/// model's initial pure state. Throws NumericalFailure if the trace drifts by
/// more than 1e-6.
std::vector<CMatrix> lindblad_oracle(const SystemModel& model, std::span<const double> t_grid);

}  // namespace homjump
