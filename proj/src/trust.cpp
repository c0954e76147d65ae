#include "trustnav/trust.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trustnav {

namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(name) + " must be in [0,1]");
  }
}

void check_half_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must be in (0,1]");
  }
}

}  // namespace

double saturate(double v, double lo, double hi) {
  if (lo > hi) {
    throw std::invalid_argument("saturate: lo must be <= hi");
  }
  return std::min(hi, std::max(lo, v));
}

void TraitWeights::validate() const {
  if (rho.size() != 3) {
    throw std::invalid_argument("rho must have exactly 3 entries");
  }
  for (double w : rho) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("every rho entry must be >= 0");
    }
  }
  const double sum = std::accumulate(rho.begin(), rho.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("rho entries must sum to 1");
  }
}

void TrustDynamicsParams::validate() const {
  check_unit(alpha, "alpha");
  check_unit(beta, "beta");
  check_half_open_unit(beta0, "beta0");
}

void TraitParams::validate() const {
  check_half_open_unit(nu1, "nu1");
  check_half_open_unit(nu2, "nu2");
  check_half_open_unit(nu3, "nu3");
  check_half_open_unit(nu01, "nu01");
  check_half_open_unit(nu02, "nu02");
  check_half_open_unit(nu03, "nu03");
}

double total_score(const std::vector<double>& traits, const TraitWeights& weights) {
  weights.validate();
  if (traits.size() != weights.rho.size()) {
    throw std::invalid_argument("traits and weights must have the same length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < traits.size(); ++i) {
    check_unit(traits[i], "trait score");
    sum += weights.rho[i] * traits[i];
  }
  return saturate(sum, 0.0, 1.0);
}

double init_trust(double total0, const TrustDynamicsParams& params) {
  params.validate();
  check_unit(total0, "total score");
  return params.beta0 * total0;
}

double update_trust(double tau_prev, double total_new, const TrustDynamicsParams& params) {
  params.validate();
  check_unit(tau_prev, "tau_prev");
  check_unit(total_new, "total score");
  return saturate(params.alpha * tau_prev + params.beta * total_new, 0.0, 1.0);
}

double update_smartphone_trait(double s_prev, double c_sm, const TraitParams& params,
                               bool first_observation) {
  params.validate();
  check_unit(c_sm, "c_sm");
  if (first_observation) {
    return saturate(params.nu01 * (1.0 - c_sm), 0.0, 1.0);
  }
  check_unit(s_prev, "s_prev");
  return saturate(params.nu1 * s_prev + (1.0 - params.nu1) * (1.0 - c_sm), 0.0, 1.0);
}

double update_eye_trait(double s_prev, double c_eye, const TraitParams& params,
                        bool first_observation) {
  params.validate();
  check_unit(c_eye, "c_eye");
  if (first_observation) {
    return saturate(params.nu02 * c_eye, 0.0, 1.0);
  }
  check_unit(s_prev, "s_prev");
  return saturate(s_prev + params.nu2 * c_eye, 0.0, 1.0);
}

double update_pose_trait(double s_prev, double c_fluc, const TraitParams& params,
                         bool first_observation) {
  params.validate();
  if (first_observation) {
    return params.nu03;
  }
  check_unit(c_fluc, "c_fluc");
  check_unit(s_prev, "s_prev");
  return saturate(params.nu3 * s_prev + (1.0 - params.nu3) * c_fluc, 0.0, 1.0);
}

TrustRegistry::TrustRegistry(TraitWeights weights, TrustDynamicsParams dynamics,
                             TraitParams traits)
    : weights_(std::move(weights)), dynamics_(dynamics), traits_(traits) {
  weights_.validate();
  dynamics_.validate();
  traits_.validate();
}

const TrustRecord& TrustRegistry::observe(const std::string& ped_id, const Confidences& c,
                                          long step) {
  check_unit(c.c_sm, "c_sm");
  check_unit(c.c_eye, "c_eye");
  check_unit(c.c_fluc, "c_fluc");

  TrustRecord& rec = records_[ped_id];
  if (!rec.initialized) {
    rec.ped_id = ped_id;
    rec.s1 = update_smartphone_trait(0.0, c.c_sm, traits_, true);
    rec.s2 = update_eye_trait(0.0, c.c_eye, traits_, true);
    rec.s3 = update_pose_trait(0.0, c.c_fluc, traits_, true);
    rec.total_score = total_score({rec.s1, rec.s2, rec.s3}, weights_);
    rec.trust = init_trust(rec.total_score, dynamics_);
    rec.last_observed_step = step;
    rec.initialized = true;
    return rec;
  }

  if (step <= rec.last_observed_step) {
    throw std::invalid_argument("observe: step must be strictly greater than last_observed_step");
  }

  // Trait recursions first, then the total score, then trust aggregation,
  // all with this step's confidences.
  rec.s1 = update_smartphone_trait(rec.s1, c.c_sm, traits_, false);
  rec.s2 = update_eye_trait(rec.s2, c.c_eye, traits_, false);
  rec.s3 = update_pose_trait(rec.s3, c.c_fluc, traits_, false);
  rec.total_score = total_score({rec.s1, rec.s2, rec.s3}, weights_);
  rec.trust = update_trust(rec.trust, rec.total_score, dynamics_);
  rec.last_observed_step = step;
  return rec;
}

const TrustRecord* TrustRegistry::find(const std::string& ped_id) const {
  auto it = records_.find(ped_id);
  return it == records_.end() ? nullptr : &it->second;
}

}  // namespace trustnav
