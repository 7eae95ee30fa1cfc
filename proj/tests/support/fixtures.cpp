#include "support/fixtures.hpp"

#include "apcalc/rng.hpp"

namespace fixtures {

using namespace apcalc;

NetworkModel neta() {
  NetworkModel m;
  m.n = 2;
  m.m = 2;
  m.seed = 11;
  m.mediators = {{1, {1.0, 0.0}, {0.1}}, {1, {0.0, 1.0}, {0.1}}};
  m.destination.readout = {{{1.0}, {}, 0.0}, {{1.0}, {}, 0.0}};
  validate_model(m);
  return m;
}

NetworkModel neta_direct() {
  NetworkModel m = neta();
  m.destination.readout[0].c = {0.4, -0.1};
  validate_model(m);
  return m;
}

NetworkModel tri() {
  NetworkModel m;
  m.n = 3;
  m.m = 3;
  m.seed = 17;
  m.mediators = {{1, {1.0, 0.0, 0.0}, {0.3}},
                 {1, {0.0, 1.0, 0.0}, {0.3}},
                 {1, {0.0, 0.0, 1.0}, {0.3}}};
  m.destination.readout = {{{1.0}, {}, 0.0}, {{1.0}, {}, 0.0}, {{1.0}, {}, 0.0}};
  validate_model(m);
  return m;
}

DiscreteNetwork netd() {
  return DiscreteNetwork::structured(
      {2, 2}, {2, 2}, {0.30, 0.20, 0.15, 0.35},
      {{0.85, 0.15, 0.70, 0.30, 0.25, 0.75, 0.10, 0.90},
       {0.80, 0.20, 0.30, 0.70, 0.65, 0.35, 0.20, 0.80}},
      {0.75, 0.25, 0.40, 0.60, 0.35, 0.65, 0.10, 0.90});
}

DiscreteNetwork junction() {
  std::vector<DiscreteNode> nodes(4);
  nodes[0] = {"A", 2, {}, {0.40, 0.60}};
  nodes[1] = {"B", 2, {}, {0.65, 0.35}};
  nodes[2] = {"S", 2, {0, 1}, {0.85, 0.15, 0.55, 0.45, 0.45, 0.55, 0.15, 0.85}};
  nodes[3] = {"D", 2, {0, 1, 2},
              {0.90, 0.10, 0.40, 0.60, 0.75, 0.25, 0.25, 0.75,
               0.70, 0.30, 0.20, 0.80, 0.55, 0.45, 0.05, 0.95}};
  return DiscreteNetwork(std::move(nodes), {2}, 3, {0, 1});
}

DiscreteNetwork frontdoor_net() {
  std::vector<DiscreteNode> nodes(4);
  nodes[0] = {"U", 2, {}, {0.55, 0.45}};
  nodes[1] = {"S", 2, {0}, {0.75, 0.25, 0.20, 0.80}};
  nodes[2] = {"X2", 2, {1}, {0.80, 0.20, 0.15, 0.85}};
  nodes[3] = {"D", 2, {2, 0}, {0.80, 0.20, 0.50, 0.50, 0.40, 0.60, 0.10, 0.90}};
  return DiscreteNetwork(std::move(nodes), {1}, 3, {2});
}

SuppressionScenario suppression_scenario(std::size_t rows, std::uint64_t seed) {
  SuppressionScenario sc;
  sc.model.n = 2;
  sc.model.m = 2;
  sc.model.seed = seed;
  sc.model.mediators = {{1, {6.0, 0.0}, {0.05}}, {1, {0.0, 0.0}, {0.05}}};
  sc.model.destination.readout = {{{1.0}, {}, 0.0}, {{1.0}, {}, 0.0}};
  sc.model.source.kind = SourceSpec::Kind::gaussian;
  sc.model.source.mean = {0.0, 0.0};
  sc.model.source.scale = {0.25, 0.25};
  validate_model(sc.model);

  Dataset features;
  features.n = 2;
  features.features.resize(rows * 2);
  const std::uint64_t key = derive_key(seed, StreamTag::generic, 77);
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = 0.25 * gaussian_at(key, r);
    features.features[r * 2] = s;
    features.features[r * 2 + 1] = s;
  }
  const TracedDataset labeled = sample_labels_given(sc.model, features, seed);
  sc.data = labeled.data;
  return sc;
}

}  // namespace fixtures
