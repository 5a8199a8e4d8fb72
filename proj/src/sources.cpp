#include "homjump/sources.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace homjump {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be > 0");
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be >= 0");
  }
}

void require_cutoff(std::size_t cutoff) {
  if (cutoff < 2) {
    throw std::invalid_argument("fock_cutoff must be >= 2");
  }
}

OperatorMatrix site_op(const CMatrix& local, std::size_t site, const BasisLayout& layout) {
  return embed(local, site, layout);
}

// G (a^dag sigma + sigma^dag a) for the atom/cavity pair.
OperatorMatrix jaynes_cummings(double g, std::size_t atom, std::size_t cavity,
                               const BasisLayout& layout) {
  const auto sigma = site_op(atom_lowering(), atom, layout);
  const auto a = site_op(annihilation(layout.sites()[cavity].dim), cavity, layout);
  return Complex{g} * (a.adjoint() * sigma + sigma.adjoint() * a);
}

}  // namespace

std::string_view to_string(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::DetectorPlus: return "DetectorPlus";
    case ChannelLabel::DetectorMinus: return "DetectorMinus";
    case ChannelLabel::AtomLoss1: return "AtomLoss1";
    case ChannelLabel::AtomLoss2: return "AtomLoss2";
  }
  return "unknown";
}

double CavityQEDParams::cooperativity(std::size_t j) const {
  if (j != 1 && j != 2) {
    throw std::invalid_argument("cooperativity: subsystem index must be 1 or 2");
  }
  const double g = j == 1 ? g_1 : g_2;
  const double kappa = j == 1 ? kappa_1 : kappa_2;
  const double gamma = j == 1 ? gamma_1 : gamma_2;
  if (gamma == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * g * g / (kappa * gamma);
}

SystemModel::SystemModel(BasisLayout layout, OperatorMatrix hamiltonian,
                         std::vector<JumpChannel> channels, StateVector initial_state)
    : layout_(std::move(layout)),
      hamiltonian_(std::move(hamiltonian)),
      channels_(std::move(channels)),
      initial_state_(std::move(initial_state)),
      h_nonhermitian_(hamiltonian_) {
  if (!(hamiltonian_.layout() == layout_) || !(initial_state_.layout() == layout_)) {
    throw std::invalid_argument("SystemModel: layout mismatch");
  }
  if (!hamiltonian_.is_hermitian()) {
    throw std::invalid_argument("SystemModel: Hamiltonian is not Hermitian");
  }
  if (std::abs(initial_state_.squared_norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("SystemModel: initial state is not normalized");
  }
  channel_rates_.reserve(channels_.size());
  for (const auto& c : channels_) {
    if (!(c.op.layout() == layout_)) {
      throw std::invalid_argument("SystemModel: channel layout mismatch");
    }
    channel_rates_.push_back(c.op.entries().adjoint() * c.op.entries());
  }
  CMatrix damping = CMatrix::Zero(hamiltonian_.entries().rows(), hamiltonian_.entries().cols());
  for (const auto& r : channel_rates_) damping += r;
  h_nonhermitian_ = OperatorMatrix(layout_, hamiltonian_.entries() - Complex{0.0, 0.5} * damping);
}

BasisLayout two_atom_layout() {
  return BasisLayout({{SiteKind::Atom, 2}, {SiteKind::Atom, 2}});
}

BasisLayout cavity_qed_layout(std::size_t fock_cutoff) {
  require_cutoff(fock_cutoff);
  return BasisLayout({{SiteKind::Atom, 2},
                      {SiteKind::Atom, 2},
                      {SiteKind::Cavity, fock_cutoff},
                      {SiteKind::Cavity, fock_cutoff}});
}

BasisLayout single_cavity_layout(std::size_t fock_cutoff) {
  require_cutoff(fock_cutoff);
  return BasisLayout({{SiteKind::Atom, 2}, {SiteKind::Cavity, fock_cutoff}});
}

SystemModel build_two_atom_model(const TwoAtomParams& p) {
  require_positive(p.gamma_1, "gamma_1");
  require_positive(p.gamma_2, "gamma_2");
  if (!std::isfinite(p.omega_eg_1) || !std::isfinite(p.omega_eg_2)) {
    throw std::invalid_argument("omega_eg must be finite");
  }
  const auto layout = two_atom_layout();
  const auto s1 = site_op(atom_lowering(), 0, layout);
  const auto s2 = site_op(atom_lowering(), 1, layout);

  const auto h = Complex{p.omega_eg_1} * (s1.adjoint() * s1) +
                 Complex{p.omega_eg_2} * (s2.adjoint() * s2);
  auto [jp, jm] = beam_splitter_mix(Complex{std::sqrt(p.gamma_1)} * s1,
                                    Complex{std::sqrt(p.gamma_2)} * s2);
  std::vector<JumpChannel> channels{{ChannelLabel::DetectorPlus, std::move(jp)},
                                    {ChannelLabel::DetectorMinus, std::move(jm)}};
  return {layout, h, std::move(channels), StateVector::basis_ket(layout, {1, 1})};
}

SystemModel build_cavity_qed_model(const CavityQEDParams& p) {
  require_cutoff(p.fock_cutoff);
  require_nonnegative(p.g_1, "g_1");
  require_nonnegative(p.g_2, "g_2");
  require_positive(p.kappa_1, "kappa_1");
  require_positive(p.kappa_2, "kappa_2");
  require_nonnegative(p.gamma_1, "gamma_1");
  require_nonnegative(p.gamma_2, "gamma_2");

  const auto layout = cavity_qed_layout(p.fock_cutoff);
  const auto h = jaynes_cummings(p.g_1, 0, 2, layout) + jaynes_cummings(p.g_2, 1, 3, layout);

  const auto a1 = site_op(annihilation(p.fock_cutoff), 2, layout);
  const auto a2 = site_op(annihilation(p.fock_cutoff), 3, layout);
  auto [jp, jm] = beam_splitter_mix(Complex{std::sqrt(p.kappa_1)} * a1,
                                    Complex{std::sqrt(p.kappa_2)} * a2);

  std::vector<JumpChannel> channels{{ChannelLabel::DetectorPlus, std::move(jp)},
                                    {ChannelLabel::DetectorMinus, std::move(jm)}};
  channels.push_back({ChannelLabel::AtomLoss1,
                      Complex{std::sqrt(p.gamma_1)} * site_op(atom_lowering(), 0, layout)});
  channels.push_back({ChannelLabel::AtomLoss2,
                      Complex{std::sqrt(p.gamma_2)} * site_op(atom_lowering(), 1, layout)});

  return {layout, h, std::move(channels), StateVector::basis_ket(layout, {0, 0, 1, 1})};
}

SystemModel build_single_cavity_model(const SingleCavityParams& p) {
  require_cutoff(p.fock_cutoff);
  require_nonnegative(p.g, "g");
  require_positive(p.kappa, "kappa");
  require_nonnegative(p.gamma, "gamma");

  const auto layout = single_cavity_layout(p.fock_cutoff);
  const auto h = jaynes_cummings(p.g, 0, 1, layout);
  const auto a = site_op(annihilation(p.fock_cutoff), 1, layout);
  const auto half = Complex{std::sqrt(p.kappa / 2.0)} * a;

  std::vector<JumpChannel> channels{{ChannelLabel::DetectorPlus, half},
                                    {ChannelLabel::DetectorMinus, half},
                                    {ChannelLabel::AtomLoss1,
                                     Complex{std::sqrt(p.gamma)} * site_op(atom_lowering(), 0, layout)}};
  return {layout, h, std::move(channels), StateVector::basis_ket(layout, {0, 1})};
}

std::pair<OperatorMatrix, OperatorMatrix> beam_splitter_mix(const OperatorMatrix& j1,
                                                            const OperatorMatrix& j2) {
  if (!(j1.layout() == j2.layout())) {
    throw std::invalid_argument("beam_splitter_mix: layout mismatch");
  }
  return {Complex{kInvSqrt2} * (j1 + j2), Complex{kInvSqrt2} * (j1 - j2)};
}

OperatorMatrix total_excitation(const BasisLayout& layout) {
  auto total = OperatorMatrix::zero(layout);
  for (std::size_t k = 0; k < layout.site_count(); ++k) {
    total += embed(number_operator(layout.sites()[k].dim), k, layout);
  }
  return total;
}

}  // namespace homjump
