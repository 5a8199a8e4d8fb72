#pragma once

// Dense complex linear algebra on small tensor-product Hilbert spaces.
//
// Basis kets are addressed by a big-endian mixed-radix flat index over the
// sites of a BasisLayout: for local indices (i0, ..., ik) and local
// dimensions (d0, ..., dk) the flat index is ((i0*d1 + i1)*d2 + i2)...
// An atom site has local index 0 = |g>, 1 = |e>; a cavity site has local
// index n = Fock state |n>.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace homjump {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Raised when a numerical routine cannot deliver its accuracy contract.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SiteKind { Atom, Cavity };

struct Site {
  SiteKind kind;
  std::size_t dim;

  bool operator==(const Site&) const = default;
};

class BasisLayout {
 public:
  BasisLayout() = default;
  explicit BasisLayout(std::vector<Site> sites);

  const std::vector<Site>& sites() const { return sites_; }
  std::size_t site_count() const { return sites_.size(); }
  std::size_t dimension() const { return dimension_; }

  std::size_t flat_index(std::span<const std::size_t> local) const;
  std::size_t flat_index(std::initializer_list<std::size_t> local) const {
    return flat_index(std::span<const std::size_t>(local.begin(), local.size()));
  }
  std::vector<std::size_t> local_indices(std::size_t flat) const;

  /// Site index of the n-th (0-based) site of the given kind, if present.
  std::optional<std::size_t> find_site(SiteKind kind, std::size_t n) const;

  bool operator==(const BasisLayout& other) const { return sites_ == other.sites_; }

 private:
  std::vector<Site> sites_;
  std::size_t dimension_ = 0;
};

class StateVector {
 public:
  StateVector() = default;
  StateVector(BasisLayout layout, CVector amplitudes);

  /// The product basis ket with the given local indices.
  static StateVector basis_ket(const BasisLayout& layout,
                               std::initializer_list<std::size_t> local);
  static StateVector zero(const BasisLayout& layout);

  const BasisLayout& layout() const { return layout_; }
  const CVector& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::size_t flat) const { return amplitudes_(static_cast<Eigen::Index>(flat)); }

  double squared_norm() const { return amplitudes_.squaredNorm(); }
  StateVector normalized() const;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator*=(Complex s);

 private:
  BasisLayout layout_;
  CVector amplitudes_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator*(Complex s, StateVector v);

/// |<a|b>|^2 / (|a|^2 |b|^2); insensitive to global phase and normalization.
double fidelity(const StateVector& a, const StateVector& b);

class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  OperatorMatrix(BasisLayout layout, CMatrix entries);

  static OperatorMatrix identity(const BasisLayout& layout);
  static OperatorMatrix zero(const BasisLayout& layout);

  const BasisLayout& layout() const { return layout_; }
  const CMatrix& entries() const { return entries_; }

  OperatorMatrix adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;

  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator-=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(Complex s);

 private:
  BasisLayout layout_;
  CMatrix entries_;
};

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator*(Complex s, OperatorMatrix a);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

/// max |A_ij - B_ij|; layouts must match.
double max_abs_difference(const OperatorMatrix& a, const OperatorMatrix& b);

/// Identity-padded Kronecker embedding of a single-site operator.
OperatorMatrix embed(const CMatrix& local_op, std::size_t site_index, const BasisLayout& layout);

StateVector apply(const OperatorMatrix& op, const StateVector& psi);

/// <psi|A|psi>, without normalizing psi.
Complex expectation(const OperatorMatrix& op, const StateVector& psi);

struct EigenDecomposition {
  CVector values;
  CMatrix vectors;  // columns are right eigenvectors
  CMatrix inverse;
  double condition_number = 0.0;
};

inline constexpr double kMaxEigenvectorCondition = 1e12;

/// A = V diag(values) V^-1 for a general (non-normal) complex matrix.
/// Throws NumericalFailure when V is ill-conditioned or the reconstruction
/// misses 1e-9 in max norm.
EigenDecomposition eigendecompose_general(const OperatorMatrix& op);

// Local single-site operators.
CMatrix atom_lowering();                 // |g><e|
CMatrix annihilation(std::size_t dim);   // a|n> = sqrt(n)|n-1>
CMatrix number_operator(std::size_t dim);

}  // namespace homjump
