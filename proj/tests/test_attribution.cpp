#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <vector>

#include "apcalc/attribution.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace apcalc;

namespace {

Dataset origin_row() {
  Dataset d;
  d.n = 2;
  d.features = {0.0, 0.0};
  return d;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("marginal scores at the symmetric point match the closed form") {
  const auto model = fixtures::neta();
  const auto data = origin_row();
  EstimatorConfig cfg;
  cfg.samples_per_point = 40000;

  const auto rep = attribution_matrix(model, data, cfg);
  CHECK(rep.n == 2);
  CHECK(rep.m == 2);
  CHECK(rep.rows == 1);
  CHECK(rep.samples_per_point == 40000);
  CHECK(rep.seed == model.seed);
  CHECK(rep.estimator == AttributionEstimator::marginal);
  CHECK(rep.direct.size() == 4);
  CHECK(rep.indirect.size() == 4);
  CHECK(rep.per_point.empty());

  // E[sigma'(d)] with d ~ N(0, 0.02); the cross cell is its exact negative.
  CHECK(rep.at(1, 1) == doctest::Approx(fixtures::kNetaPointScore).epsilon(1e-3));
  CHECK(rep.at(2, 1) == doctest::Approx(-fixtures::kNetaPointScore).epsilon(1e-3));
  CHECK(rep.at(2, 2) == doctest::Approx(rep.at(1, 1)).epsilon(2e-3));
  CHECK(std::abs(rep.at(1, 1) + rep.at(1, 2)) < 1e-15);  // labels sum to zero
  CHECK(std::abs(rep.at(2, 1) + rep.at(2, 2)) < 1e-15);

  // The single-cell helper walks the same draws.
  CHECK(attribution_marginal(model, data, 1, 1, cfg) == rep.at(1, 1));
  CHECK(attribution_marginal(model, data, 2, 1, cfg) == rep.at(2, 1));

  CHECK_THROWS_AS(rep.at(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(rep.at(1, 3), std::invalid_argument);
}

TEST_CASE("conditional estimator freezes the queried label's mediator") {
  const auto model = fixtures::neta();
  const auto data = origin_row();
  EstimatorConfig cfg;
  cfg.samples_per_point = 40000;

  const auto rep =
      attribution_matrix(model, data, cfg, AttributionEstimator::conditional);
  CHECK(rep.estimator == AttributionEstimator::conditional);
  CHECK(rep.direct.empty());
  CHECK(rep.indirect.empty());

  // Holding X_1 fixed kills the (1,1) response entirely: the per-draw
  // gradient is identically zero, so both the score and its variance vanish.
  CHECK(rep.at(1, 1) == 0.0);
  CHECK(rep.uncertainty[0] == 0.0);
  // The cross effect survives: source 2 still reshuffles the competitor.
  CHECK(rep.at(2, 1) == doctest::Approx(-fixtures::kNetaPointScore).epsilon(1e-3));
  CHECK(rep.uncertainty[2] > 0.0);

  CHECK(attribution_conditional(model, data, 1, 1, cfg) == rep.at(1, 1));
  CHECK(attribution_conditional(model, data, 2, 1, cfg) == rep.at(2, 1));
  CHECK(attribution_uncertainty(model, data, 2, 1, cfg) == rep.uncertainty[2]);

  // The uncertainty is a per-draw variance, not a variance of the mean: it
  // stabilizes as K grows instead of shrinking.
  EstimatorConfig k2 = cfg, k8 = cfg;
  k2.samples_per_point = 2000;
  k8.samples_per_point = 8000;
  const double v2 = attribution_uncertainty(model, data, 2, 1, k2);
  const double v8 = attribution_uncertainty(model, data, 2, 1, k8);
  CHECK(v8 / v2 > 0.7);  // a variance of the mean would drop by 4x here
  CHECK(v8 / v2 < 1.4);
}

TEST_CASE("direct and indirect parts add up to the marginal score") {
  const auto model = fixtures::neta_direct();
  const auto data = origin_row();
  EstimatorConfig cfg;
  cfg.samples_per_point = 40000;

  const auto rep = attribution_matrix(model, data, cfg);
  for (std::size_t c = 0; c < 4; ++c)
    CHECK(rep.direct[c] + rep.indirect[c] ==
          doctest::Approx(rep.scores[c]).epsilon(1e-12));

  // At the origin the direct part is c_11 * E[p1 p2] = 0.4 * E[sigma'(d)] and
  // the indirect part is the plain mediated score.
  CHECK(rep.direct[0] ==
        doctest::Approx(0.4 * fixtures::kNetaPointScore).epsilon(2e-3));
  CHECK(rep.indirect[0] == doctest::Approx(fixtures::kNetaPointScore).epsilon(1e-3));

  const double t[2] = {0.0, 0.0};
  const auto parts = decompose(model, t, 1, 1, cfg);
  const double whole = attribution_marginal_point(model, t, 1, 1, cfg);
  CHECK(parts.first + parts.second == doctest::Approx(whole).epsilon(1e-12));
  CHECK(parts.first == doctest::Approx(0.4 * fixtures::kNetaPointScore).epsilon(2e-3));

  // Without an explicit source path the direct part is exactly zero and the
  // indirect part carries the whole score.
  const auto plain = fixtures::neta();
  const auto plain_parts = decompose(plain, t, 1, 1, cfg);
  CHECK(plain_parts.first == 0.0);
  CHECK(plain_parts.second == attribution_marginal_point(plain, t, 1, 1, cfg));
}

TEST_CASE("finite differences on shared noise reproduce the analytic gradient") {
  const auto model = fixtures::neta_direct();
  EstimatorConfig cfg;
  cfg.samples_per_point = 2000;
  const double t[2] = {0.3, -0.2};
  for (int i = 1; i <= 2; ++i)
    for (int l = 1; l <= 2; ++l) {
      const double analytic = attribution_marginal_point(model, t, i, l, cfg);
      const double fd = fd_marginal_gradient(model, t, i, l, cfg);
      CHECK(rel_err(analytic, fd) <= 1e-5);
    }
  EstimatorConfig bad = cfg;
  bad.fd_step = 0.0;
  CHECK_THROWS_AS(fd_marginal_gradient(model, t, 1, 1, bad), std::invalid_argument);
}

TEST_CASE("per-point blocks average to the dataset scores and sum to zero") {
  const auto model = fixtures::neta_direct();
  const auto data = sample_joint(model, 16, 5).data;
  EstimatorConfig cfg;
  cfg.samples_per_point = 2000;

  const auto rep =
      attribution_matrix(model, data, cfg, AttributionEstimator::marginal, true);
  REQUIRE(rep.per_point.size() == 16);
  REQUIRE(rep.per_point[0].size() == 4);
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0.0;
    for (const auto& block : rep.per_point) mean += block[c];
    mean /= static_cast<double>(rep.per_point.size());
    CHECK(mean == doctest::Approx(rep.scores[c]).epsilon(1e-12));
  }
  for (const auto& block : rep.per_point)
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(block[i * 2] + block[i * 2 + 1]) < 1e-14);

  const auto crep =
      attribution_matrix(model, data, cfg, AttributionEstimator::conditional, true);
  REQUIRE(crep.per_point.size() == 16);
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0.0;
    for (const auto& block : crep.per_point) mean += block[c];
    mean /= static_cast<double>(crep.per_point.size());
    CHECK(mean == doctest::Approx(crep.scores[c]).epsilon(1e-12));
  }
}

TEST_CASE("results do not depend on the thread schedule") {
  const auto model = fixtures::neta_direct();
  const auto data = sample_joint(model, 32, 6).data;
  EstimatorConfig one;
  one.samples_per_point = 2000;
  one.threads = 1;
  EstimatorConfig four = one;
  four.threads = 4;

  const auto a = attribution_matrix(model, data, one, AttributionEstimator::marginal, true);
  const auto b = attribution_matrix(model, data, four, AttributionEstimator::marginal, true);
  CHECK(a.scores == b.scores);
  CHECK(a.uncertainty == b.uncertainty);
  CHECK(a.direct == b.direct);
  CHECK(a.indirect == b.indirect);
  CHECK(a.per_point == b.per_point);
}

TEST_CASE("attribution input validation") {
  const auto model = fixtures::neta();
  const auto data = origin_row();
  EstimatorConfig cfg;

  Dataset empty;
  empty.n = 2;
  CHECK_THROWS_AS(attribution_matrix(model, empty, cfg), std::invalid_argument);
  Dataset wrong;
  wrong.n = 3;
  wrong.features = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(attribution_matrix(model, wrong, cfg), std::invalid_argument);

  EstimatorConfig odd = cfg;
  odd.samples_per_point = 1001;
  const double t[2] = {0.0, 0.0};
  CHECK_THROWS_AS(attribution_matrix(model, data, odd), std::invalid_argument);
  CHECK_THROWS_AS(attribution_marginal(model, data, 1, 1, odd), std::invalid_argument);
  CHECK_THROWS_AS(attribution_marginal_point(model, t, 1, 1, odd), std::invalid_argument);
  CHECK_THROWS_AS(decompose(model, t, 1, 1, odd), std::invalid_argument);

  CHECK_THROWS_AS(attribution_marginal(model, data, 0, 1, cfg), std::invalid_argument);
  CHECK_THROWS_AS(attribution_marginal(model, data, 1, 0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(attribution_marginal(model, data, 3, 1, cfg), std::invalid_argument);
  CHECK_THROWS_AS(attribution_conditional(model, data, 1, 3, cfg), std::invalid_argument);
}
