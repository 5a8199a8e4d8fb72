#include "homjump/algebra.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace homjump {

namespace {

void require_same_layout(const BasisLayout& a, const BasisLayout& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": layout mismatch");
  }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericalFailure(std::string(what) + ": non-finite amplitude");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// BasisLayout

BasisLayout::BasisLayout(std::vector<Site> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) {
    throw std::invalid_argument("BasisLayout: at least one site required");
  }
  dimension_ = 1;
  for (const auto& s : sites_) {
    if (s.dim < 2) {
      throw std::invalid_argument("BasisLayout: local dimension must be >= 2");
    }
    if (s.kind == SiteKind::Atom && s.dim != 2) {
      throw std::invalid_argument("BasisLayout: atoms are two-level");
    }
    dimension_ *= s.dim;
  }
}

std::size_t BasisLayout::flat_index(std::span<const std::size_t> local) const {
  if (local.size() != sites_.size()) {
    throw std::invalid_argument("flat_index: wrong number of local indices");
  }
  std::size_t index = 0;
  for (std::size_t k = 0; k < sites_.size(); ++k) {
    if (local[k] >= sites_[k].dim) {
      throw std::invalid_argument("flat_index: local index out of range");
    }
    index = index * sites_[k].dim + local[k];
  }
  return index;
}

std::vector<std::size_t> BasisLayout::local_indices(std::size_t flat) const {
  if (flat >= dimension_) {
    throw std::invalid_argument("local_indices: flat index out of range");
  }
  std::vector<std::size_t> local(sites_.size());
  for (std::size_t k = sites_.size(); k-- > 0;) {
    local[k] = flat % sites_[k].dim;
    flat /= sites_[k].dim;
  }
  return local;
}

std::optional<std::size_t> BasisLayout::find_site(SiteKind kind, std::size_t n) const {
  std::size_t seen = 0;
  for (std::size_t k = 0; k < sites_.size(); ++k) {
    if (sites_[k].kind == kind) {
      if (seen == n) return k;
      ++seen;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(BasisLayout layout, CVector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.dimension()) {
    throw std::invalid_argument("StateVector: amplitude count does not match layout");
  }
  require_finite(amplitudes_, "StateVector");
}

StateVector StateVector::basis_ket(const BasisLayout& layout,
                                   std::initializer_list<std::size_t> local) {
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(layout.dimension()));
  amps(static_cast<Eigen::Index>(layout.flat_index(local))) = 1.0;
  return {layout, std::move(amps)};
}

StateVector StateVector::zero(const BasisLayout& layout) {
  return {layout, CVector::Zero(static_cast<Eigen::Index>(layout.dimension()))};
}

StateVector StateVector::normalized() const {
  const double n = amplitudes_.norm();
  if (n == 0.0) {
    throw std::invalid_argument("normalized: zero vector");
  }
  return {layout_, amplitudes_ / n};
}

StateVector& StateVector::operator+=(const StateVector& other) {
  require_same_layout(layout_, other.layout_, "StateVector::operator+=");
  amplitudes_ += other.amplitudes_;
  return *this;
}

StateVector& StateVector::operator*=(Complex s) {
  amplitudes_ *= s;
  require_finite(amplitudes_, "StateVector::operator*=");
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator*(Complex s, StateVector v) { return v *= s; }

double fidelity(const StateVector& a, const StateVector& b) {
  require_same_layout(a.layout(), b.layout(), "fidelity");
  const double na = a.squared_norm();
  const double nb = b.squared_norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("fidelity: zero vector");
  }
  return std::norm(a.amplitudes().dot(b.amplitudes())) / (na * nb);
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(BasisLayout layout, CMatrix entries)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
  const auto d = static_cast<Eigen::Index>(layout_.dimension());
  if (entries_.rows() != d || entries_.cols() != d) {
    throw std::invalid_argument("OperatorMatrix: entries do not match layout");
  }
  require_finite(entries_, "OperatorMatrix");
}

OperatorMatrix OperatorMatrix::identity(const BasisLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  return {layout, CMatrix::Identity(d, d)};
}

OperatorMatrix OperatorMatrix::zero(const BasisLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  return {layout, CMatrix::Zero(d, d)};
}

OperatorMatrix OperatorMatrix::adjoint() const { return {layout_, entries_.adjoint()}; }

bool OperatorMatrix::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  require_same_layout(layout_, other.layout_, "OperatorMatrix::operator+=");
  entries_ += other.entries_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& other) {
  require_same_layout(layout_, other.layout_, "OperatorMatrix::operator-=");
  entries_ -= other.entries_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(Complex s) {
  entries_ *= s;
  return *this;
}

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
OperatorMatrix operator*(Complex s, OperatorMatrix a) { return a *= s; }

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_layout(a.layout(), b.layout(), "OperatorMatrix::operator*");
  return {a.layout(), a.entries() * b.entries()};
}

double max_abs_difference(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_layout(a.layout(), b.layout(), "max_abs_difference");
  return (a.entries() - b.entries()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Free operations

OperatorMatrix embed(const CMatrix& local_op, std::size_t site_index, const BasisLayout& layout) {
  if (site_index >= layout.site_count()) {
    throw std::invalid_argument("embed: site index out of range");
  }
  const auto local_dim = static_cast<Eigen::Index>(layout.sites()[site_index].dim);
  if (local_op.rows() != local_dim || local_op.cols() != local_dim) {
    throw std::invalid_argument("embed: local operator dimension does not match site");
  }
  // I_left (x) op (x) I_right, with left = product of dims before the site.
  std::size_t left = 1;
  std::size_t right = 1;
  for (std::size_t k = 0; k < layout.site_count(); ++k) {
    if (k < site_index) left *= layout.sites()[k].dim;
    if (k > site_index) right *= layout.sites()[k].dim;
  }
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  CMatrix full = CMatrix::Zero(d, d);
  const auto R = static_cast<Eigen::Index>(right);
  const auto block = local_dim * R;
  for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(left); ++l) {
    for (Eigen::Index i = 0; i < local_dim; ++i) {
      for (Eigen::Index j = 0; j < local_dim; ++j) {
        const Complex v = local_op(i, j);
        if (v == Complex{}) continue;
        for (Eigen::Index r = 0; r < R; ++r) {
          full(l * block + i * R + r, l * block + j * R + r) = v;
        }
      }
    }
  }
  return {layout, std::move(full)};
}

StateVector apply(const OperatorMatrix& op, const StateVector& psi) {
  require_same_layout(op.layout(), psi.layout(), "apply");
  return {psi.layout(), op.entries() * psi.amplitudes()};
}

Complex expectation(const OperatorMatrix& op, const StateVector& psi) {
  require_same_layout(op.layout(), psi.layout(), "expectation");
  const Complex value = psi.amplitudes().dot(op.entries() * psi.amplitudes());
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw NumericalFailure("expectation: non-finite result");
  }
  return value;
}

EigenDecomposition eigendecompose_general(const OperatorMatrix& op) {
  const CMatrix& a = op.entries();
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eigendecompose_general: eigensolver did not converge");
  }
  EigenDecomposition out;
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();

  Eigen::JacobiSVD<CMatrix> svd(out.vectors);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  out.condition_number = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!(out.condition_number <= kMaxEigenvectorCondition)) {
    throw NumericalFailure("eigendecompose_general: eigenvector matrix is ill-conditioned (cond = " +
                           std::to_string(out.condition_number) + ")");
  }
  out.inverse = out.vectors.partialPivLu().inverse();

  const CMatrix rebuilt = out.vectors * out.values.asDiagonal() * out.inverse;
  const double err = (rebuilt - a).cwiseAbs().maxCoeff();
  if (!(err <= 1e-9)) {
    throw NumericalFailure("eigendecompose_general: reconstruction error " + std::to_string(err) +
                           " exceeds 1e-9");
  }
  return out;
}

CMatrix atom_lowering() {
  CMatrix s = CMatrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

CMatrix annihilation(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  CMatrix a = CMatrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

CMatrix number_operator(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  CMatrix n = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

}  // namespace homjump
