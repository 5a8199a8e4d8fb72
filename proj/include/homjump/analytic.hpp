#pragma once

// Closed-form states and jump statistics for identical sources, used as
// exact references for the trajectory engine.

#include <cstddef>

#include "homjump/algebra.hpp"
#include "homjump/sources.hpp"

namespace homjump::analytic {

enum class Detector { Plus, Minus };

/// e^{-2i w t} e^{-gamma t} |e1 e2> (unnormalized). Identical atoms only.
StateVector two_atom_no_jump_state(double t, const TwoAtomParams& p);

/// e^{-2i w t1} (|g1 e2> +- |e1 g2>)/sqrt2 after the first click.
StateVector two_atom_post_first_jump(double t1, const TwoAtomParams& p, Detector which);

/// gamma e^{-gamma dt} for a second click on the same detector, 0 otherwise.
double two_atom_second_jump_probability_density(double delta_t, const TwoAtomParams& p,
                                                bool same_detector);

/// |P_same - P_diff| / (P_same + P_diff).
double visibility(double p_same, double p_diff);

/// exp(-i H t) for H = G sum_j (a_j^dag sigma_j + sigma_j^dag a_j), pairing the
/// j-th atom with the j-th cavity of the layout. On |g,n> the pair block is
/// cos(G t sqrt n)|g,n> - i sin(G t sqrt n)|e,n-1>; |e, top> is invariant
/// under truncation.
OperatorMatrix jc_propagator(double t, double g, const BasisLayout& layout);

/// No-jump state before the first click, identical subsystems:
///   e^{-kt} cos^2(Gt) |gg;11> - i e^{-(k/2 + gamma/4)t} cos(Gt) sin(Gt) (|eg;01> + |ge;10>)
///   - e^{-gamma t/2} sin^2(Gt) |ee;00>
/// The loss exponents are kept as written in the original derivation; they
/// agree with exact propagation only for kappa = gamma = 0.
StateVector jc_no_jump_state(double t, const CavityQEDParams& p);

/// Normalized state right after the first click. Valid for kappa = gamma.
StateVector jc_post_first_jump(double t1, double g, Detector which, std::size_t fock_cutoff = 2);

/// Amplitude on |gg;00> after the second click: sqrt(k) e^{-k dt/2} cos(G t1 + G dt)
/// for the same detector, 0 for different detectors. Valid for kappa = gamma.
Complex jc_second_jump_amplitude(double t1, double delta_t, const CavityQEDParams& p,
                                 Detector first, Detector second);

}  // namespace homjump::analytic
