#pragma once
// Shared test fixtures. Numeric constants here were derived once by exact
// enumeration of the discrete fixtures (see enumeration_oracle, which
// re-derives them independently at test time) or by closed-form analysis of
// the gaussian model, then frozen. Tests compare against the constants, not
// against whatever the library currently returns.

#include <cstdint>
#include <vector>

#include "apcalc/dataset.hpp"
#include "apcalc/discrete_network.hpp"
#include "apcalc/network_model.hpp"

namespace fixtures {

// Two standard-normal sources feeding two axis-aligned one-dimensional
// mediators (noise 0.1) read out with unit coefficients. Fully symmetric.
apcalc::NetworkModel neta();

// neta plus an explicit source->destination path c = (0.4, -0.1) on label 1.
apcalc::NetworkModel neta_direct();

// Three labels, three axis mediators, noise 0.3; label l is dominated by
// mediator l, so dominance argmax is label-dependent (m = 2 models tie).
apcalc::NetworkModel tri();

// Correlated binary sources (exogenous joint prior), two binary mediators,
// binary destination.
apcalc::DiscreteNetwork netd();

// A <- .4/.6, B <- .65/.35 into S and D; S -> D confounded by both roots.
apcalc::DiscreteNetwork junction();

// U -> S -> X2 -> D with U -> D; X2 satisfies the mediating cut conditions.
apcalc::DiscreteNetwork frontdoor_net();

// Duplicated-feature scenario: s2 is a byte-exact copy of s1 ~ N(0, tau^2),
// only mediator 1 reads the sources (weight w on s1), labels sampled from
// the generating model. R_spurious(2, 1) starts well above 0.3.
struct SuppressionScenario {
  apcalc::NetworkModel model;
  apcalc::Dataset data;
};
SuppressionScenario suppression_scenario(std::size_t rows, std::uint64_t seed);

// netd, exact enumeration:
inline constexpr double kNetdMarg00[2] = {0.623, 0.377};
inline constexpr double kNetdMarg01[2] = {0.406, 0.594};
inline constexpr double kNetdMarg10[2] = {0.35375, 0.64625};
inline constexpr double kNetdMarg11[2] = {0.182, 0.818};
inline constexpr double kNetdCondX1[2] = {0.2625, 0.7375};   // S=(1,0), X1=1
inline constexpr double kNetdCondX2[2] = {0.175, 0.825};     // S=(1,0), X2=1
inline constexpr double kNetdDom10[2] = {0.0249796875, 0.0172046875};  // S=(1,0), any l
inline constexpr double kNetdDoS1[2] = {0.50365, 0.2592875};    // P(D=1 | do(S1=v))
inline constexpr double kNetdDoS2[2] = {0.488375, 0.294};       // P(D=1 | do(S2=v))
inline constexpr double kNetdFlipS1L1 = -0.2443625;             // do(S1=1) - do(S1=0)
inline constexpr double kNetdInfoGain[2][2] = {{0.048185399933, 0.022375890941},
                                               {0.026426339077, 0.033873509178}};

// junction, exact enumeration:
inline constexpr double kJunctionDo[2] = {0.7275, 0.2275};     // P(D=1 | do(S=v))
inline constexpr double kJunctionNaive[2] = {0.785792079208, 0.168030303030};

// frontdoor_net, exact enumeration:
inline constexpr double kFrontdoorDo[2] = {0.415, 0.675};      // P(D=2 | do(S=v))
inline constexpr double kFrontdoorNaive[2] = {0.333731343284, 0.757085427136};

// neta at the zero point: d = u1 - u2 ~ N(0, 0.02), and the marginal score
// of (1,1) equals E[sigma'(d)] (its (2,1) conditional score is the negative).
inline constexpr double kNetaPointScore = 0.248762326076;

}  // namespace fixtures
