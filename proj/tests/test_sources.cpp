#include <doctest.h>

#include <cmath>
#include <random>

#include "homjump/sources.hpp"
#include "support.hpp"

using namespace homjump;
using homjump::testing::max_abs;

namespace {

std::vector<SystemModel> sample_models() {
  CavityQEDParams mismatched;
  mismatched.g_1 = mismatched.g_2 = 2.0;
  mismatched.kappa_2 = 10.0;
  CavityQEDParams lossless;
  lossless.gamma_1 = lossless.gamma_2 = 0.0;
  CavityQEDParams wide = mismatched;
  wide.fock_cutoff = 3;
  return {build_two_atom_model({}),
          build_two_atom_model({0.2, 0.9, 1.0, 3.0}),
          build_cavity_qed_model({}),
          build_cavity_qed_model(mismatched),
          build_cavity_qed_model(lossless),
          build_cavity_qed_model(wide),
          build_single_cavity_model({2.0, 1.5, 0.5, 2})};
}

}  // namespace

TEST_CASE("two-atom model") {
  const double gamma = 1.7;
  const auto model = build_two_atom_model({0.0, 0.0, gamma, gamma});
  const auto& layout = model.layout();
  CHECK(layout.dimension() == 4);
  CHECK(model.channels().size() == 2);
  CHECK(model.channels()[0].label == ChannelLabel::DetectorPlus);
  CHECK(model.channels()[1].label == ChannelLabel::DetectorMinus);
  CHECK(max_abs(model.initial_state().amplitudes() -
                StateVector::basis_ket(layout, {1, 1}).amplitudes()) == 0.0);

  const auto ee = layout.flat_index({1, 1});
  CHECK(std::abs(model.h_nonhermitian().entries()(ee, ee) - Complex{0.0, -gamma}) <= 1e-14);

  const auto s1 = embed(atom_lowering(), 0, layout);
  const auto s2 = embed(atom_lowering(), 1, layout);
  const CMatrix rates = model.channel_rates()[0] + model.channel_rates()[1];
  const CMatrix direct = gamma * (s1.adjoint() * s1).entries() + gamma * (s2.adjoint() * s2).entries();
  CHECK(max_abs(rates - direct) <= 1e-14);

  const auto& jp = model.channels()[0].op;
  CHECK(expectation(jp.adjoint() * jp, model.initial_state()).real() ==
        doctest::Approx(gamma).epsilon(1e-14));

  CHECK_THROWS_AS(build_two_atom_model({0.0, 0.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_two_atom_model({0.0, 0.0, 1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("cavity QED model") {
  const CavityQEDParams p;
  const auto model = build_cavity_qed_model(p);
  const auto& layout = model.layout();
  CHECK(layout.dimension() == 16);
  REQUIRE(model.channels().size() == 4);
  CHECK(model.channels()[2].label == ChannelLabel::AtomLoss1);
  CHECK(model.channels()[3].label == ChannelLabel::AtomLoss2);
  CHECK_FALSE(model.channels()[2].is_detector());
  CHECK(model.initial_state().amplitude(layout.flat_index({0, 0, 1, 1})) == Complex{1.0});

  const auto total = total_excitation(layout);
  CHECK(expectation(total, model.initial_state()).real() == 2.0);

  CavityQEDParams c8;
  c8.g_1 = 2.0;
  CHECK(c8.cooperativity(1) == doctest::Approx(8.0));
  CavityQEDParams no_loss;
  no_loss.gamma_1 = 0.0;
  CHECK(std::isinf(no_loss.cooperativity(1)));

  CavityQEDParams bad;
  bad.fock_cutoff = 1;
  CHECK_THROWS_AS(build_cavity_qed_model(bad), std::invalid_argument);
  bad = {};
  bad.kappa_2 = 0.0;
  CHECK_THROWS_AS(build_cavity_qed_model(bad), std::invalid_argument);
}

TEST_CASE("lossless atoms: no-jump decay comes only from cavity leakage") {
  CavityQEDParams p;
  p.g_1 = p.g_2 = 1.4;
  p.kappa_1 = 0.7;
  p.kappa_2 = 2.1;
  p.gamma_1 = p.gamma_2 = 0.0;
  const auto model = build_cavity_qed_model(p);
  const auto& layout = model.layout();
  const auto n1 = embed(number_operator(2), 2, layout);
  const auto n2 = embed(number_operator(2), 3, layout);
  const CMatrix& h = model.h_nonhermitian().entries();
  const CMatrix anti = Complex{0.0, 1.0} * (h - h.adjoint());
  CHECK(max_abs(anti - (p.kappa_1 * n1.entries() + p.kappa_2 * n2.entries())) <= 1e-14);
}

TEST_CASE("anti-Hermitian part accounts for every channel") {
  for (const auto& model : sample_models()) {
    CMatrix sum = CMatrix::Zero(model.h_nonhermitian().entries().rows(),
                                model.h_nonhermitian().entries().cols());
    for (const auto& r : model.channel_rates()) sum += r;
    const CMatrix& h = model.h_nonhermitian().entries();
    CHECK(max_abs(h - h.adjoint() - Complex{0.0, -1.0} * sum) <= 1e-12);
    CHECK(model.hamiltonian_hermitian().is_hermitian());
  }
}

TEST_CASE("excitation number commutes with the JC Hamiltonian") {
  for (const auto& model : sample_models()) {
    const auto total = total_excitation(model.layout());
    const auto& h = model.hamiltonian_hermitian();
    CHECK(max_abs_difference(total * h, h * total) <= 1e-12);
  }
}

TEST_CASE("beam splitter mix") {
  const auto layout = two_atom_layout();
  std::mt19937_64 rng(3);
  SUBCASE("(A, A)") {
    const OperatorMatrix a(layout, testing::random_matrix(rng, 4));
    const auto [plus, minus] = beam_splitter_mix(a, a);
    CHECK(max_abs_difference(plus, Complex{std::sqrt(2.0)} * a) <= 1e-14);
    CHECK(max_abs(minus.entries()) == 0.0);
  }
  SUBCASE("reproduces the two-atom channels") {
    const double gamma = 0.6;
    const auto s1 = Complex{std::sqrt(gamma)} * embed(atom_lowering(), 0, layout);
    const auto s2 = Complex{std::sqrt(gamma)} * embed(atom_lowering(), 1, layout);
    const auto [plus, minus] = beam_splitter_mix(s1, s2);
    const auto model = build_two_atom_model({0.0, 0.0, gamma, gamma});
    CHECK(max_abs_difference(plus, model.channels()[0].op) <= 1e-15);
    CHECK(max_abs_difference(minus, model.channels()[1].op) <= 1e-15);
  }
  SUBCASE("channel sum J+dag J+ + J-dag J- is preserved on random matrices") {
    const auto layout16 = cavity_qed_layout(2);
    for (int trial = 0; trial < 25; ++trial) {
      const OperatorMatrix j1(layout16, testing::random_matrix(rng, 16));
      const OperatorMatrix j2(layout16, testing::random_matrix(rng, 16));
      const auto [plus, minus] = beam_splitter_mix(j1, j2);
      const auto mixed = plus.adjoint() * plus + minus.adjoint() * minus;
      const auto bare = j1.adjoint() * j1 + j2.adjoint() * j2;
      CHECK(max_abs_difference(mixed, bare) <= 1e-12);
    }
  }
  SUBCASE("layout mismatch") {
    CHECK_THROWS_AS(beam_splitter_mix(OperatorMatrix::identity(layout),
                                      OperatorMatrix::identity(cavity_qed_layout(2))),
                    std::invalid_argument);
  }
}

TEST_CASE("single cavity model splits leakage evenly") {
  const SingleCavityParams p{1.0, 0.8, 0.3, 2};
  const auto model = build_single_cavity_model(p);
  CHECK(model.layout().dimension() == 4);
  REQUIRE(model.channels().size() == 3);
  CHECK(model.channels()[0].label == ChannelLabel::DetectorPlus);
  CHECK(model.channels()[1].label == ChannelLabel::DetectorMinus);
  CHECK(max_abs_difference(model.channels()[0].op, model.channels()[1].op) == 0.0);
  const auto a = embed(annihilation(2), 1, model.layout());
  CHECK(max_abs_difference(model.channels()[0].op, Complex{std::sqrt(p.kappa / 2)} * a) <= 1e-15);
}
