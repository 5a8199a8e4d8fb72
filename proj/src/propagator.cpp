#include "homjump/propagator.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace homjump {

namespace {

constexpr int kMinExponent = -46;
constexpr int kMaxExponent = 12;

}  // namespace

Propagator::Propagator(const OperatorMatrix& h_nonhermitian)
    : layout_(h_nonhermitian.layout()), generator_(Complex{0.0, -1.0} * h_nonhermitian.entries()) {
  try {
    auto eig = eigendecompose_general(h_nonhermitian);
    if (eig.condition_number <= kSpectralConditionLimit) {
      rates_ = Complex{0.0, -1.0} * eig.values;
      spectral_ = std::move(eig);
      return;
    }
  } catch (const NumericalFailure&) {
    // defective or nearly so; fall through to the exponential table
  }
  table_.reserve(kMaxExponent - kMinExponent + 1);
  for (int k = kMinExponent; k <= kMaxExponent; ++k) {
    const CMatrix scaled = generator_ * std::ldexp(1.0, k);
    table_.push_back(scaled.exp());
  }
}

CVector Propagator::propagate(const CVector& psi, double dt) const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("propagate: dt must be finite and >= 0");
  }
  if (static_cast<std::size_t>(psi.size()) != layout_.dimension()) {
    throw std::invalid_argument("propagate: layout mismatch");
  }
  if (spectral_) {
    const auto& e = *spectral_;
    const CVector c = e.inverse * psi;
    return e.vectors * ((rates_ * dt).array().exp() * c.array()).matrix();
  }
  return propagate_table(psi, dt);
}

StateVector Propagator::propagate(const StateVector& psi, double dt) const {
  if (!(psi.layout() == layout_)) {
    throw std::invalid_argument("propagate: layout mismatch");
  }
  return {layout_, propagate(psi.amplitudes(), dt)};
}

CVector Propagator::propagate_table(const CVector& psi, double dt) const {
  CVector out = psi;
  const double top = std::ldexp(1.0, kMaxExponent);
  while (dt >= 2.0 * top) {
    out = table_.back() * out;
    dt -= top;
  }
  const double quantum = std::ldexp(1.0, kMinExponent);
  auto ticks = static_cast<std::uint64_t>(std::floor(dt / quantum));
  const double remainder = dt - static_cast<double>(ticks) * quantum;
  for (std::size_t k = 0; ticks != 0; ++k, ticks >>= 1) {
    if (ticks & 1U) out = table_[k] * out;
  }
  // remainder < 2^-46: first order is exact to double precision
  if (remainder > 0.0) out += remainder * (generator_ * out);
  return out;
}

Propagator::Segment::Segment(const Propagator& owner, CVector start)
    : owner_(&owner), start_(std::move(start)) {
  if (static_cast<std::size_t>(start_.size()) != owner.layout_.dimension()) {
    throw std::invalid_argument("Propagator::segment: layout mismatch");
  }
  if (owner.spectral_) coeffs_ = owner.spectral_->inverse * start_;
}

CVector Propagator::Segment::state(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("Segment::state: t must be finite and >= 0");
  }
  if (owner_->spectral_) {
    return owner_->spectral_->vectors * ((owner_->rates_ * t).array().exp() * coeffs_.array()).matrix();
  }
  return owner_->propagate_table(start_, t);
}

double Propagator::Segment::squared_norm(double t) const { return state(t).squaredNorm(); }

}  // namespace homjump
