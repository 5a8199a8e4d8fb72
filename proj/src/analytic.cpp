#include "homjump/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace homjump::analytic {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};

void require_identical(const TwoAtomParams& p) {
  if (p.gamma_1 != p.gamma_2 || p.omega_eg_1 != p.omega_eg_2) {
    throw std::invalid_argument("closed form requires identical atoms");
  }
  if (!(p.gamma_1 > 0.0)) throw std::invalid_argument("gamma must be > 0");
}

void require_identical(const CavityQEDParams& p) {
  if (p.g_1 != p.g_2 || p.kappa_1 != p.kappa_2 || p.gamma_1 != p.gamma_2) {
    throw std::invalid_argument("closed form requires identical atom-cavity systems");
  }
}

void require_time(double t, const char* name) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
  }
}

// Local (atom, cavity) block of exp(-i H_JC t), atom index major.
CMatrix pair_propagator(double gt, std::size_t cavity_dim) {
  const auto d = static_cast<Eigen::Index>(cavity_dim);
  CMatrix u = CMatrix::Zero(2 * d, 2 * d);
  auto g_idx = [](Eigen::Index n) { return n; };
  auto e_idx = [d](Eigen::Index n) { return d + n; };
  u(g_idx(0), g_idx(0)) = 1.0;
  for (Eigen::Index n = 0; n + 1 < d; ++n) {
    // block {|e,n>, |g,n+1>} rotates at angle G t sqrt(n+1)
    const double theta = gt * std::sqrt(static_cast<double>(n + 1));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    u(e_idx(n), e_idx(n)) = c;
    u(g_idx(n + 1), g_idx(n + 1)) = c;
    u(g_idx(n + 1), e_idx(n)) = -kI * s;
    u(e_idx(n), g_idx(n + 1)) = -kI * s;
  }
  u(e_idx(d - 1), e_idx(d - 1)) = 1.0;
  return u;
}

// Embeds an operator on the (atom, cavity) pair into the full layout.
CMatrix embed_pair(const CMatrix& local, std::size_t atom, std::size_t cavity,
                   const BasisLayout& layout) {
  const auto dim = layout.dimension();
  const std::size_t cdim = layout.sites()[cavity].dim;
  CMatrix full = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    const auto in = layout.local_indices(col);
    const auto lc = static_cast<Eigen::Index>(in[atom] * cdim + in[cavity]);
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t n = 0; n < cdim; ++n) {
        const Complex v = local(static_cast<Eigen::Index>(a * cdim + n), lc);
        if (v == Complex{}) continue;
        auto out = in;
        out[atom] = a;
        out[cavity] = n;
        full(static_cast<Eigen::Index>(layout.flat_index(out)), static_cast<Eigen::Index>(col)) = v;
      }
    }
  }
  return full;
}

}  // namespace

StateVector two_atom_no_jump_state(double t, const TwoAtomParams& p) {
  require_identical(p);
  require_time(t, "t");
  const auto layout = two_atom_layout();
  const Complex amp = std::exp(Complex{-p.gamma_1 * t, -2.0 * p.omega_eg_1 * t});
  return amp * StateVector::basis_ket(layout, {1, 1});
}

StateVector two_atom_post_first_jump(double t1, const TwoAtomParams& p, Detector which) {
  require_identical(p);
  require_time(t1, "t1");
  const auto layout = two_atom_layout();
  const Complex phase = std::exp(Complex{0.0, -2.0 * p.omega_eg_1 * t1});
  const double sign = which == Detector::Plus ? 1.0 : -1.0;
  auto psi = StateVector::basis_ket(layout, {0, 1}) +
             Complex{sign} * StateVector::basis_ket(layout, {1, 0});
  return (phase * kInvSqrt2) * psi;
}

double two_atom_second_jump_probability_density(double delta_t, const TwoAtomParams& p,
                                                bool same_detector) {
  require_identical(p);
  require_time(delta_t, "delta_t");
  return same_detector ? p.gamma_1 * std::exp(-p.gamma_1 * delta_t) : 0.0;
}

double visibility(double p_same, double p_diff) {
  if (!(p_same >= 0.0) || !(p_diff >= 0.0)) {
    throw std::invalid_argument("visibility: probabilities must be >= 0");
  }
  if (p_same + p_diff == 0.0) {
    throw std::invalid_argument("visibility: both probabilities are zero");
  }
  return std::abs(p_same - p_diff) / (p_same + p_diff);
}

OperatorMatrix jc_propagator(double t, double g, const BasisLayout& layout) {
  CMatrix u = CMatrix::Identity(static_cast<Eigen::Index>(layout.dimension()),
                                static_cast<Eigen::Index>(layout.dimension()));
  for (std::size_t j = 0;; ++j) {
    const auto atom = layout.find_site(SiteKind::Atom, j);
    const auto cavity = layout.find_site(SiteKind::Cavity, j);
    if (!atom || !cavity) break;
    const std::size_t cdim = layout.sites()[*cavity].dim;
    u = embed_pair(pair_propagator(g * t, cdim), *atom, *cavity, layout) * u;
  }
  return {layout, std::move(u)};
}

StateVector jc_no_jump_state(double t, const CavityQEDParams& p) {
  require_identical(p);
  require_time(t, "t");
  const auto layout = cavity_qed_layout(p.fock_cutoff);
  const double c = std::cos(p.g_1 * t);
  const double s = std::sin(p.g_1 * t);
  const double k = p.kappa_1;
  const double gm = p.gamma_1;
  auto psi = Complex{std::exp(-k * t) * c * c} * StateVector::basis_ket(layout, {0, 0, 1, 1});
  psi += (-kI * std::exp(-(k / 2.0 + gm / 4.0) * t) * c * s) *
         (StateVector::basis_ket(layout, {1, 0, 0, 1}) + StateVector::basis_ket(layout, {0, 1, 1, 0}));
  psi += Complex{-std::exp(-gm * t / 2.0) * s * s} * StateVector::basis_ket(layout, {1, 1, 0, 0});
  return psi;
}

StateVector jc_post_first_jump(double t1, double g, Detector which, std::size_t fock_cutoff) {
  require_time(t1, "t1");
  const auto layout = cavity_qed_layout(fock_cutoff);
  const double c = std::cos(g * t1);
  const double s = std::sin(g * t1);
  // Components where source 2 still holds the excitation carry +; those where
  // source 1 holds it carry the detector sign.
  const double sign = which == Detector::Plus ? 1.0 : -1.0;
  auto photon = StateVector::basis_ket(layout, {0, 0, 0, 1}) +
                Complex{sign} * StateVector::basis_ket(layout, {0, 0, 1, 0});
  auto atom = StateVector::basis_ket(layout, {0, 1, 0, 0}) +
              Complex{sign} * StateVector::basis_ket(layout, {1, 0, 0, 0});
  auto psi = Complex{c} * photon + (-kI * s) * atom;
  return Complex{kInvSqrt2} * psi;
}

Complex jc_second_jump_amplitude(double t1, double delta_t, const CavityQEDParams& p,
                                 Detector first, Detector second) {
  require_identical(p);
  require_time(t1, "t1");
  require_time(delta_t, "delta_t");
  if (first != second) return {};
  const double k = p.kappa_1;
  return std::sqrt(k) * std::exp(-k * delta_t / 2.0) * std::cos(p.g_1 * t1 + p.g_1 * delta_t);
}

}  // namespace homjump::analytic
