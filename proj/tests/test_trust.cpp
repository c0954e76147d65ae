#include "trustnav/trust.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace trustnav {
namespace {

TraitWeights paper_weights() { return TraitWeights{{0.4, 0.5, 0.1}}; }

TrustDynamicsParams paper_dynamics() {
  TrustDynamicsParams p;
  p.alpha = 1.0;
  p.beta = 0.08;
  p.beta0 = 0.55;
  return p;
}

TraitParams paper_traits() {
  TraitParams p;
  p.nu1 = 0.6;
  p.nu2 = 0.10;
  p.nu3 = 0.8;
  p.nu01 = 1.0;
  p.nu02 = 1.0;
  p.nu03 = 0.5;
  return p;
}

TEST(Saturate, ClampsAndPassesThrough) {
  EXPECT_DOUBLE_EQ(saturate(1.03, 0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(saturate(-0.2, 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(saturate(0.5, 0.0, 1.0), 0.5);
}

TEST(Saturate, RejectsInvertedBounds) {
  EXPECT_THROW(saturate(0.5, 1.0, 0.0), std::invalid_argument);
}

TEST(TotalScore, WeightedCombination) {
  const TraitWeights w = paper_weights();
  EXPECT_DOUBLE_EQ(total_score({1.0, 1.0, 1.0}, w), 1.0);
  EXPECT_NEAR(total_score({0.5, 1.0, 0.0}, w), 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(total_score({0.0, 0.0, 0.0}, w), 0.0);
}

TEST(TotalScore, RejectsBadInputs) {
  EXPECT_THROW(total_score({0.5, 0.5, 0.5}, TraitWeights{{0.4, 0.5, 0.2}}),
               std::invalid_argument);
  EXPECT_THROW(total_score({0.5, 0.5, 0.5}, TraitWeights{{0.5, 0.5}}), std::invalid_argument);
  EXPECT_THROW(total_score({1.2, 0.0, 0.0}, paper_weights()), std::domain_error);
  EXPECT_THROW(total_score({-0.1, 0.0, 0.0}, paper_weights()), std::domain_error);
}

TEST(InitTrust, ScalesInitialScore) {
  EXPECT_NEAR(init_trust(1.0, paper_dynamics()), 0.55, 1e-15);
  EXPECT_DOUBLE_EQ(init_trust(0.0, paper_dynamics()), 0.0);
  TrustDynamicsParams identity = paper_dynamics();
  identity.beta0 = 1.0;
  EXPECT_DOUBLE_EQ(init_trust(0.8, identity), 0.8);
}

TEST(UpdateTrust, SaturatesAtOne) {
  TrustDynamicsParams p;
  p.alpha = 1.0;
  p.beta = 0.08;
  EXPECT_DOUBLE_EQ(update_trust(0.95, 1.0, p), 1.0);
}

TEST(UpdateTrust, ConvexBlend) {
  TrustDynamicsParams p;
  p.alpha = 0.5;
  p.beta = 0.5;
  EXPECT_NEAR(update_trust(0.6, 0.8, p), 0.7, 1e-15);
}

TEST(UpdateTrust, MovingAverageConvergesToConstantInput) {
  TrustDynamicsParams p;
  p.alpha = 0.9;
  p.beta = 0.1;
  const double S = 0.4;
  double tau = 1.0;
  for (int t = 0; t < 50; ++t) {
    tau = update_trust(tau, S, p);
  }
  EXPECT_LT(std::abs(tau - S), 0.01);
  // Closed form of the unsaturated recursion: tau(t) = S + alpha^t (tau0 - S).
  EXPECT_NEAR(tau, S + std::pow(0.9, 50) * (1.0 - S), 1e-12);
}

TEST(UpdateSmartphoneTrait, SpecCases) {
  TraitParams p = paper_traits();
  EXPECT_DOUBLE_EQ(update_smartphone_trait(0.0, 1.0, p, true), 0.0);
  EXPECT_NEAR(update_smartphone_trait(0.5, 0.0, p, false), 0.7, 1e-15);
  for (double x : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    EXPECT_NEAR(update_smartphone_trait(x, 1.0 - x, p, false), x, 1e-15);
  }
}

TEST(UpdateEyeTrait, SpecCases) {
  TraitParams p = paper_traits();
  EXPECT_DOUBLE_EQ(update_eye_trait(0.95, 1.0, p, false), 1.0);
  EXPECT_DOUBLE_EQ(update_eye_trait(0.3, 0.0, p, false), 0.3);
  EXPECT_DOUBLE_EQ(update_eye_trait(0.0, 0.5, p, true), 0.5);
}

TEST(UpdatePoseTrait, SpecCases) {
  TraitParams p = paper_traits();
  EXPECT_DOUBLE_EQ(update_pose_trait(0.0, 0.0, p, true), 0.5);
  EXPECT_NEAR(update_pose_trait(0.5, 0.5, p, false), 0.5, 1e-15);
  EXPECT_NEAR(update_pose_trait(1.0, 0.0, p, false), 0.8, 1e-15);
}

TEST(Observe, FirstObservationComposesInitializations) {
  TrustRegistry registry(paper_weights(), paper_dynamics(), paper_traits());
  // c_sm = 0, c_eye = 1: s1 = 1, s2 = 1, s3 = 0.5,
  // S = 0.4 + 0.5 + 0.05 = 0.95, trust = 0.55 * 0.95 = 0.5225.
  const TrustRecord& rec = registry.observe("a", Confidences{0.0, 1.0, 0.3}, 0);
  EXPECT_NEAR(rec.trust, 0.5225, 1e-12);
  EXPECT_NEAR(rec.total_score, 0.95, 1e-12);
  EXPECT_TRUE(rec.initialized);
  EXPECT_EQ(rec.last_observed_step, 0);
}

TEST(Observe, UnobservedStepsFreezeTrust) {
  TrustRegistry registry(paper_weights(), paper_dynamics(), paper_traits());
  registry.observe("a", Confidences{0.1, 0.5, 0.5}, 0);
  const double after_first = registry.find("a")->trust;
  // No call at step 1: record untouched.
  EXPECT_DOUBLE_EQ(registry.find("a")->trust, after_first);
  registry.observe("a", Confidences{0.1, 0.5, 0.5}, 2);
  EXPECT_GT(registry.find("a")->last_observed_step, 0);
}

TEST(Observe, InterleavedPedestriansAreIndependent) {
  TrustRegistry both(paper_weights(), paper_dynamics(), paper_traits());
  TrustRegistry only_a(paper_weights(), paper_dynamics(), paper_traits());
  TrustRegistry only_b(paper_weights(), paper_dynamics(), paper_traits());

  const Confidences ca{0.0, 0.8, 0.9};
  const Confidences cb{0.9, 0.1, 0.2};
  for (long t = 0; t < 20; ++t) {
    both.observe("a", ca, t);
    both.observe("b", cb, t);
    only_a.observe("a", ca, t);
    only_b.observe("b", cb, t);
  }
  EXPECT_DOUBLE_EQ(both.find("a")->trust, only_a.find("a")->trust);
  EXPECT_DOUBLE_EQ(both.find("b")->trust, only_b.find("b")->trust);
}

TEST(Observe, RejectsNonMonotoneStep) {
  TrustRegistry registry(paper_weights(), paper_dynamics(), paper_traits());
  registry.observe("a", Confidences{0.5, 0.5, 0.5}, 3);
  EXPECT_THROW(registry.observe("a", Confidences{0.5, 0.5, 0.5}, 3), std::invalid_argument);
  EXPECT_THROW(registry.observe("a", Confidences{0.5, 0.5, 0.5}, 1), std::invalid_argument);
}

TEST(Observe, DeterministicTrajectories) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Confidences> sequence;
  for (int t = 0; t < 100; ++t) {
    sequence.push_back(Confidences{unit(rng), unit(rng), unit(rng)});
  }
  TrustRegistry r1(paper_weights(), paper_dynamics(), paper_traits());
  TrustRegistry r2(paper_weights(), paper_dynamics(), paper_traits());
  for (int t = 0; t < 100; ++t) {
    const double t1 = r1.observe("a", sequence[static_cast<std::size_t>(t)], t).trust;
    const double t2 = r2.observe("a", sequence[static_cast<std::size_t>(t)], t).trust;
    ASSERT_EQ(t1, t2);  // bitwise
  }
}

TEST(TrustProperties, ScoresStayInUnitIntervalUnderRandomUpdates) {
  std::mt19937 rng(20230815);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int trial = 0; trial < 200; ++trial) {
    TrustDynamicsParams dyn;
    dyn.alpha = unit(rng);
    dyn.beta = unit(rng);
    dyn.beta0 = 0.05 + 0.95 * unit(rng);
    TraitParams traits;
    traits.nu1 = 0.05 + 0.95 * unit(rng);
    traits.nu2 = 0.05 + 0.95 * unit(rng);
    traits.nu3 = 0.05 + 0.95 * unit(rng);
    traits.nu01 = 0.05 + 0.95 * unit(rng);
    traits.nu02 = 0.05 + 0.95 * unit(rng);
    traits.nu03 = 0.05 + 0.95 * unit(rng);

    TrustRegistry registry(paper_weights(), dyn, traits);
    double prev_s2 = 0.0;
    for (long t = 0; t < 50; ++t) {
      const TrustRecord& rec =
          registry.observe("p", Confidences{unit(rng), unit(rng), unit(rng)}, t);
      for (double v : {rec.s1, rec.s2, rec.s3, rec.total_score, rec.trust}) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
      if (t > 0) {
        ASSERT_GE(rec.s2, prev_s2);  // eye-contact score only accumulates
      }
      prev_s2 = rec.s2;
    }
  }
}

TEST(TrustProperties, MonotoneRegimeNeverDecreases) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TrustDynamicsParams dyn = paper_dynamics();  // alpha = 1

  for (int trial = 0; trial < 100; ++trial) {
    TrustRegistry registry(paper_weights(), dyn, paper_traits());
    double prev = -1.0;
    for (long t = 0; t < 40; ++t) {
      const TrustRecord& rec =
          registry.observe("p", Confidences{unit(rng), unit(rng), unit(rng)}, t);
      ASSERT_GE(rec.trust, prev);
      prev = rec.trust;
    }
  }
}

TEST(TrustProperties, MovingAverageMatchesClosedForm) {
  // alpha + beta = 1, beta0 = 1: with constant total score S the recursion is
  // tau(t) = S + alpha^t (tau(0) - S).
  TrustDynamicsParams dyn;
  dyn.alpha = 0.7;
  dyn.beta = 0.3;
  dyn.beta0 = 1.0;
  const double S = 0.62;
  double tau = init_trust(S, dyn);
  EXPECT_DOUBLE_EQ(tau, S);
  // Start away from S to see the geometric decay.
  tau = 0.1;
  for (int t = 1; t <= 30; ++t) {
    tau = update_trust(tau, S, dyn);
    EXPECT_NEAR(tau, S + std::pow(dyn.alpha, t) * (0.1 - S), 1e-12);
  }
}

TEST(TrustParams, Validation) {
  TrustDynamicsParams dyn;
  dyn.alpha = 1.2;
  EXPECT_THROW(dyn.validate(), std::exception);
  dyn = TrustDynamicsParams{};
  dyn.beta0 = 0.0;
  EXPECT_THROW(dyn.validate(), std::invalid_argument);
  TraitParams traits;
  traits.nu2 = 0.0;
  EXPECT_THROW(traits.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace trustnav
