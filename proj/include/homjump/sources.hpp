#pragma once

// Single-photon source models: two excited two-level atoms, two
// Jaynes-Cummings atom-cavity systems, and a single atom-cavity system
// split onto two detectors. Rates are in units of a reference rate, hbar = 1.

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "homjump/algebra.hpp"

namespace homjump {

enum class ChannelLabel { DetectorPlus, DetectorMinus, AtomLoss1, AtomLoss2 };

std::string_view to_string(ChannelLabel label);

constexpr bool is_detector_label(ChannelLabel label) {
  return label == ChannelLabel::DetectorPlus || label == ChannelLabel::DetectorMinus;
}

struct JumpChannel {
  ChannelLabel label;
  OperatorMatrix op;

  bool is_detector() const { return is_detector_label(label); }
};

struct TwoAtomParams {
  double omega_eg_1 = 0.0;
  double omega_eg_2 = 0.0;
  double gamma_1 = 1.0;
  double gamma_2 = 1.0;
};

struct CavityQEDParams {
  double g_1 = 1.0;
  double g_2 = 1.0;
  double kappa_1 = 1.0;
  double kappa_2 = 1.0;
  double gamma_1 = 1.0;
  double gamma_2 = 1.0;
  std::size_t fock_cutoff = 2;

  /// C_j = 2 g_j^2 / (kappa_j gamma_j); infinite when gamma_j = 0.
  double cooperativity(std::size_t j) const;
};

/// One atom-cavity system whose output is split 50/50 onto two detectors.
struct SingleCavityParams {
  double g = 1.0;
  double kappa = 1.0;
  double gamma = 1.0;
  std::size_t fock_cutoff = 2;
};

/// A source setup ready for trajectory simulation. The non-Hermitian
/// Hamiltonian is derived as H - (i/2) sum_c J_c^dag J_c over every channel.
class SystemModel {
 public:
  SystemModel(BasisLayout layout, OperatorMatrix hamiltonian, std::vector<JumpChannel> channels,
              StateVector initial_state);

  const BasisLayout& layout() const { return layout_; }
  const OperatorMatrix& hamiltonian_hermitian() const { return hamiltonian_; }
  const OperatorMatrix& h_nonhermitian() const { return h_nonhermitian_; }
  const std::vector<JumpChannel>& channels() const { return channels_; }
  const StateVector& initial_state() const { return initial_state_; }

  /// J_c^dag J_c for each channel, in channel order.
  const std::vector<CMatrix>& channel_rates() const { return channel_rates_; }

 private:
  BasisLayout layout_;
  OperatorMatrix hamiltonian_;
  std::vector<JumpChannel> channels_;
  StateVector initial_state_;
  OperatorMatrix h_nonhermitian_;
  std::vector<CMatrix> channel_rates_;
};

BasisLayout two_atom_layout();
BasisLayout cavity_qed_layout(std::size_t fock_cutoff);
BasisLayout single_cavity_layout(std::size_t fock_cutoff);

SystemModel build_two_atom_model(const TwoAtomParams& p);
SystemModel build_cavity_qed_model(const CavityQEDParams& p);
SystemModel build_single_cavity_model(const SingleCavityParams& p);

/// 50/50 beam splitter: ((j1 + j2)/sqrt2, (j1 - j2)/sqrt2).
std::pair<OperatorMatrix, OperatorMatrix> beam_splitter_mix(const OperatorMatrix& j1,
                                                            const OperatorMatrix& j2);

/// Sum over atoms and cavities of the local excitation number.
OperatorMatrix total_excitation(const BasisLayout& layout);

}  // namespace homjump
