#pragma once

#include <map>
#include <string>
#include <vector>

namespace trustnav {

/// Clamps v onto [lo, hi]. Throws std::invalid_argument if lo > hi.
double saturate(double v, double lo, double hi);

/// Weights of the linear combination that turns trait scores into a total
/// score. Exactly three traits are supported: smartphone usage, eye contact,
/// pose fluctuation.
struct TraitWeights {
  std::vector<double> rho{0.4, 0.5, 0.1};

  /// Throws std::invalid_argument unless rho has length 3, all entries are
  /// non-negative, and the entries sum to 1 within 1e-9.
  void validate() const;
};

/// Parameters of the trust aggregation recursion
///   tau(t+1) = sat[0,1](alpha * tau(t) + beta * S(t+1)),  tau(0) = beta0 * S(0).
///
/// alpha + beta = 1 with beta0 = 1 gives a moving average; alpha = 1 with
/// small beta gives monotonically increasing trust.
struct TrustDynamicsParams {
  double alpha = 1.0;
  double beta = 0.08;
  double beta0 = 0.55;

  void validate() const;
};

/// Retention/injection constants of the three trait-score recursions.
struct TraitParams {
  double nu1 = 0.6;    // smartphone score retention
  double nu2 = 0.10;   // eye-contact increment gain
  double nu3 = 0.8;    // pose score retention
  double nu01 = 1.0;   // smartphone initial proportion
  double nu02 = 1.0;   // eye-contact initial proportion
  double nu03 = 0.5;   // pose initial score

  void validate() const;
};

/// One step of classifier outputs for a pedestrian, all in [0, 1].
struct Confidences {
  double c_sm = 0.0;    // smartphone usage confidence
  double c_eye = 0.0;   // eye contact confidence
  double c_fluc = 0.0;  // pose steadiness confidence
};

/// Per-pedestrian trait scores and aggregated trust.
struct TrustRecord {
  std::string ped_id;
  double s1 = 0.0;  // smartphone trait score
  double s2 = 0.0;  // eye-contact trait score (non-decreasing after init)
  double s3 = 0.0;  // pose-fluctuation trait score
  double total_score = 0.0;
  double trust = 0.0;
  long last_observed_step = -1;
  bool initialized = false;
};

/// Weighted total score of one step's trait scores; result clamped to [0, 1].
/// Throws on invalid weights or traits outside [0, 1].
double total_score(const std::vector<double>& traits, const TraitWeights& weights);

/// Initial trust beta0 * S0.
double init_trust(double total0, const TrustDynamicsParams& params);

/// One step of the trust aggregation recursion.
double update_trust(double tau_prev, double total_new, const TrustDynamicsParams& params);

/// Smartphone trait recursion. High usage confidence lowers the score.
double update_smartphone_trait(double s_prev, double c_sm, const TraitParams& params,
                               bool first_observation);

/// Eye-contact trait recursion. Adds nu2 * c_eye under saturation, so the
/// score never decreases after initialization.
double update_eye_trait(double s_prev, double c_eye, const TraitParams& params,
                        bool first_observation);

/// Pose-fluctuation trait recursion.
double update_pose_trait(double s_prev, double c_fluc, const TraitParams& params,
                         bool first_observation);

/// Registry of trust records keyed by tracking identifier. Single-writer;
/// records are plain values safe to copy out and read concurrently.
class TrustRegistry {
 public:
  TrustRegistry(TraitWeights weights, TrustDynamicsParams dynamics, TraitParams traits);

  /// Folds one step of confidences into the pedestrian's record, creating it
  /// on first sight. step must be strictly greater than the record's
  /// last_observed_step; c_fluc is ignored on the first observation (the
  /// pose trait starts at nu03). Unobserved pedestrians keep their last
  /// trust value; records are never evicted.
  const TrustRecord& observe(const std::string& ped_id, const Confidences& c, long step);

  /// Record for ped_id, or nullptr if never observed.
  const TrustRecord* find(const std::string& ped_id) const;

  const std::map<std::string, TrustRecord>& records() const { return records_; }

 private:
  TraitWeights weights_;
  TrustDynamicsParams dynamics_;
  TraitParams traits_;
  std::map<std::string, TrustRecord> records_;
};

}  // namespace trustnav
