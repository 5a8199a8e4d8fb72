#include <doctest.h>

#include <cmath>
#include <numeric>

#include "homjump/lindblad.hpp"
#include "homjump/statistics.hpp"

using namespace homjump;

namespace {

constexpr auto P = ChannelLabel::DetectorPlus;
constexpr auto M = ChannelLabel::DetectorMinus;
constexpr auto L1 = ChannelLabel::AtomLoss1;

TrajectoryRecord record(std::vector<JumpEvent> events) {
  TrajectoryRecord r;
  r.events = std::move(events);
  return r;
}

}  // namespace

TEST_CASE("coincidence classification") {
  const std::vector<TrajectoryRecord> records = {
      record({{0.1, P}, {0.4, P}}),
      record({{0.2, M}, {0.3, M}}),
      record({{0.2, M}, {0.5, P}}),
      record({{0.1, L1}, {0.6, P}}),
      record({}),
      record({{0.1, P}, {0.2, L1}, {0.9, M}, {1.0, M}}),
  };
  const auto r = coincidence_stats(records);
  CHECK(r.n_trajectories == 6);
  CHECK(r.n_two_click == 4);
  CHECK(r.n_same_detector == 2);
  CHECK(r.n_diff_detector == 2);
  CHECK(r.n_discarded == 2);
  CHECK(r.coincidence_fraction == 0.5);
  CHECK(r.standard_error == doctest::Approx(std::sqrt(0.25 / 4)));

  const std::vector<TrajectoryRecord> none = {record({}), record({{0.3, P}})};
  CHECK_THROWS_AS(coincidence_stats(none), UndefinedFraction);
  CHECK(coincidence_counts(none).n_discarded == 2);
}

TEST_CASE("identical two-atom sources always coincide") {
  const JumpEngine engine(build_two_atom_model({}));
  const auto records = run_ensemble(engine, {500, 60.0, 3, 0, nullptr});
  const auto r = coincidence_stats(records);
  CHECK(r.n_diff_detector == 0);
  CHECK(r.coincidence_fraction == 1.0);
  CHECK(r.standard_error == 0.0);
}

TEST_CASE("coincidence sweep") {
  const std::vector<double> ratios = {1.0, 50.0};
  const EnsembleSpec spec{400, 60.0, 1, 0};
  const auto jc = coincidence_sweep(CavityQEDParams{}, SweepVariable::Kappa2Ratio, ratios, spec);
  REQUIRE(jc.size() == 2);
  CHECK(jc[0].ratio == 1.0);
  CHECK(jc[0].result.coincidence_fraction == 1.0);
  CHECK(jc[1].result.coincidence_fraction < 0.8);

  const auto atoms = coincidence_sweep(TwoAtomParams{}, SweepVariable::Gamma2Ratio, ratios, spec);
  CHECK(atoms[0].result.coincidence_fraction == 1.0);

  CHECK_THROWS_AS(coincidence_sweep(TwoAtomParams{}, SweepVariable::Kappa2Ratio, ratios, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(coincidence_sweep(CavityQEDParams{}, SweepVariable::Kappa2Ratio, ratios,
                                    EnsembleSpec{99, 60.0, 1, 0}),
                  std::invalid_argument);
  const std::vector<double> below = {0.5};
  CHECK_THROWS_AS(coincidence_sweep(CavityQEDParams{}, SweepVariable::Kappa2Ratio, below, spec),
                  std::invalid_argument);
}

TEST_CASE("expectation series") {
  const JumpEngine engine(build_cavity_qed_model({}));
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  const auto series = expectation_series(engine, {200, 1.0, 9, 0}, grid);
  CHECK(series.n_trajectories == 200);
  CHECK(series.mean_of(Observable::N1)[0] == 1.0);
  CHECK(series.mean_of(Observable::N2)[0] == 1.0);
  CHECK(series.mean_of(Observable::E1)[0] == doctest::Approx(0.0));
  CHECK(series.mean_of(Observable::E2)[0] == doctest::Approx(0.0));
  CHECK(series.mean_of(Observable::Total)[0] == 2.0);
  CHECK(series.se_of(Observable::N1)[0] == 0.0);
  CHECK(series.se_of(Observable::N1)[2] > 0.0);
  CHECK_THROWS_AS(expectation_series(engine, {0, 1.0, 9, 0}, grid), std::invalid_argument);

  const auto obs = standard_observables(two_atom_layout());
  CHECK(obs[0].entries().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("delay histogram") {
  const auto empty = make_delay_histogram(0.25, 1.1);
  CHECK(empty.bin_count() == 5);
  CHECK(empty.edges.back() == 1.25);
  CHECK(make_delay_histogram(0.25, 1.0).bin_count() == 4);
  CHECK_THROWS_AS(make_delay_histogram(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_delay_histogram(0.1, -1.0), std::invalid_argument);

  const std::vector<TrajectoryRecord> records = {
      record({{1.0, P}, {1.1, P}}),  record({{1.0, P}, {1.3, M}}), record({{0.0, M}, {0.99, M}}),
      record({{2.0, P}, {2.0, P}}),  record({{0.5, P}}),           record({{0.5, P}, {9.0, P}}),
  };
  const auto h = delay_histogram(records, 0.25, 1.0);
  CHECK(h.coincidence == std::vector<std::size_t>{2, 0, 0, 1});
  CHECK(h.anticoincidence == std::vector<std::size_t>{0, 1, 0, 0});

  SUBCASE("totals are conserved when bins are refined") {
    const JumpEngine engine(build_cavity_qed_model([] {
      CavityQEDParams p;
      p.kappa_2 = 4.0;
      return p;
    }()));
    const auto recs = run_ensemble(engine, {1000, 40.0, 11, 0, nullptr});
    const auto coarse = delay_histogram(recs, 0.5, 40.0);
    for (const double bw : {0.25, 0.125, 0.01}) {
      const auto fine = delay_histogram(recs, bw, 40.0);
      CHECK(fine.total_coincidence() == coarse.total_coincidence());
      CHECK(fine.total_anticoincidence() == coarse.total_anticoincidence());
    }
    CHECK(coarse.total_coincidence() + coarse.total_anticoincidence() ==
          coincidence_counts(recs).n_two_click);
  }
  SUBCASE("identical JC sources produce no anticoincidences") {
    const JumpEngine engine(build_cavity_qed_model({}));
    const auto recs = run_ensemble(engine, {1000, 60.0, 5, 0, nullptr});
    const auto id = delay_histogram(recs, 0.25, 60.0);
    CHECK(id.total_anticoincidence() == 0);
    CHECK(id.total_coincidence() > 0);
  }
  SUBCASE("short t_max leaves every bin empty") {
    const JumpEngine engine(build_cavity_qed_model({}));
    const auto recs = run_ensemble(engine, {50, 1e-9, 5, 0, nullptr});
    const auto none = delay_histogram(recs, 0.25, 1e-9);
    CHECK(none.total_coincidence() + none.total_anticoincidence() == 0);
  }
}

TEST_CASE("independent union") {
  const std::vector<TrajectoryRecord> a = {record({{0.2, P}}), record({{1.0, M}}), record({}),
                                           record({{0.1, P}})};
  const std::vector<TrajectoryRecord> b = {record({{0.3, P}}), record({{0.1, P}}),
                                           record({{0.4, M}}), record({{2.1, M}})};
  const auto h = independent_union(a, b, 0.5, 2.0);
  CHECK(h.coincidence == std::vector<std::size_t>{1, 0, 0, 0});
  CHECK(h.anticoincidence == std::vector<std::size_t>{0, 1, 0, 1});

  const auto self = independent_union(a, a, 0.5, 2.0);
  CHECK(self.coincidence[0] == 3);
  CHECK(self.total_coincidence() == 3);
  CHECK(self.total_anticoincidence() == 0);

  CHECK_THROWS_AS(independent_union(a, std::span(b).first(3), 0.5, 2.0), std::invalid_argument);

  SUBCASE("total counts equal the number of clicked pairs") {
    const JumpEngine engine(build_single_cavity_model({1.0, 1.0, 0.0, 2}));
    const auto ra = run_ensemble(engine, {500, 60.0, 0, 0, nullptr});
    const auto rb = run_ensemble(engine, {500, 60.0, 500, 0, nullptr});
    const auto u = independent_union(ra, rb, 0.25, 60.0);
    CHECK(u.total_coincidence() + u.total_anticoincidence() == 500);
  }
}

TEST_CASE("half-max delay") {
  DelayHistogram h = make_delay_histogram(1.0, 5.0);
  h.coincidence = {10, 8, 4, 2, 0};
  // half of 10 is crossed between the centres 1.5 (8) and 2.5 (4)
  CHECK(half_max_delay(h) == doctest::Approx(1.5 + 0.75));
  h.coincidence = {10, 5, 0, 0, 0};
  CHECK(half_max_delay(h) == doctest::Approx(1.5));
  h.coincidence = {1, 1, 1, 1, 1};
  CHECK(half_max_delay(h) == doctest::Approx(4.5));
}

TEST_CASE("single-source click times follow the emission rate") {
  // P(click by t) = integral of kappa <n>(s) ds from the master equation
  const SingleCavityParams p{1.5, 1.0, 0.4, 2};
  const auto model = build_single_cavity_model(p);
  const JumpEngine engine(model);
  const std::size_t n = 20000;
  const auto recs = run_ensemble(engine, {n, 30.0, 77, 0, nullptr});

  std::vector<double> grid;
  for (int i = 0; i <= 600; ++i) grid.push_back(0.01 * i);
  const auto rho = lindblad_oracle(model, grid);
  const CMatrix photons = embed(number_operator(2), 1, model.layout()).entries();
  std::vector<double> cdf(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = (photons * rho[i - 1]).trace().real();
    const double b = (photons * rho[i]).trace().real();
    cdf[i] = cdf[i - 1] + p.kappa * 0.5 * (a + b) * (grid[i] - grid[i - 1]);
  }
  for (std::size_t i = 50; i < grid.size(); i += 50) {
    std::size_t clicked = 0;
    for (const auto& r : recs) {
      for (const auto& e : r.events) {
        if (!is_detector_label(e.label)) continue;
        if (e.time <= grid[i]) ++clicked;
        break;
      }
    }
    const double f = static_cast<double>(clicked) / n;
    const double se = std::sqrt(cdf[i] * (1.0 - cdf[i]) / n);
    CHECK(std::abs(f - cdf[i]) <= 4.0 * se + 1e-4);
  }
}
