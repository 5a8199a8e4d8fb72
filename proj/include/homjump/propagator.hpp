#pragma once

#include <optional>
#include <vector>

#include "homjump/algebra.hpp"

namespace homjump {

/// Exact no-jump evolution psi(t) = exp(-i H_NH t) psi(0) for a
/// time-independent non-Hermitian Hamiltonian.
///
/// The Hamiltonian is diagonalized once. When the eigenvector matrix is too
/// ill-conditioned to propagate at full accuracy (H_NH at or near an
/// exceptional point) the propagator switches to a table of exact matrix
/// exponentials exp(-i H 2^k) and composes arbitrary times from their
/// binary expansion.
class Propagator {
 public:
  /// Eigenvector condition numbers above this use the exponential table.
  static constexpr double kSpectralConditionLimit = 1e6;

  explicit Propagator(const OperatorMatrix& h_nonhermitian);

  bool spectral() const { return spectral_.has_value(); }
  const BasisLayout& layout() const { return layout_; }

  CVector propagate(const CVector& psi, double dt) const;
  StateVector propagate(const StateVector& psi, double dt) const;

  /// Evolution from a fixed start state, evaluated at many times.
  class Segment {
   public:
    CVector state(double t) const;
    double squared_norm(double t) const;

   private:
    friend class Propagator;
    Segment(const Propagator& owner, CVector start);

    const Propagator* owner_;
    CVector start_;
    CVector coeffs_;  // V^-1 psi0 on the spectral path
  };

  Segment segment(const CVector& start) const { return Segment(*this, start); }

 private:
  CVector propagate_table(const CVector& psi, double dt) const;

  BasisLayout layout_;
  CMatrix generator_;  // -i H_NH
  std::optional<EigenDecomposition> spectral_;
  CVector rates_;      // -i * eigenvalues
  // exp(-i H 2^k) for k = kMinExponent .. kMaxExponent.
  std::vector<CMatrix> table_;
};

}  // namespace homjump
