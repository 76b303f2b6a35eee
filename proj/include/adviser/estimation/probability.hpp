#pragma once

#include <optional>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/core/random.hpp"
#include "adviser/core/types.hpp"
#include "adviser/estimation/logistic.hpp"

namespace adviser {

// Survey-derived success probabilities for the interventions that have no
// historical data. An absent value is sampled per mother as in D1: uniform
// between the previous intervention's probability and 1.
struct UntestedConstants {
  std::optional<double> voucher;
  std::optional<double> bus;
  double drive = 1.0;
};

// Chained D1 draw: p_n ~ U(0,1), p_c ~ U(p_n,1), p_t ~ U(p_c,1), p_l ~ U(p_t,1).
inline Probabilities sample_chained(Rng& rng) {
  Probabilities p;
  p.none = rng.uniform();
  p.call = rng.uniform(p.none, 1.0);
  p.voucher = rng.uniform(p.call, 1.0);
  p.bus = rng.uniform(p.voucher, 1.0);
  p.drive = 1.0;
  return p;
}

struct AssembledTable {
  ProbabilityTable table;
  int clamped = 0;  // rows where the call model fell below the no-call model
};

// Fills p_t and p_l from constants or by sampling after the given p_n, p_c.
inline Probabilities complete_row(double p_none, double p_call, const UntestedConstants& k, Rng& rng) {
  Probabilities p;
  p.none = p_none;
  p.call = p_call;
  p.voucher = k.voucher ? *k.voucher : rng.uniform(p.call, 1.0);
  p.bus = k.bus ? *k.bus : rng.uniform(p.voucher, 1.0);
  p.drive = k.drive;
  if (!p.ordered()) throw ConfigError("untested-intervention constants violate the probability ordering");
  return p;
}

// p_n and p_c come from the two models; if the call model predicts lower
// than the no-call model, p_c is raised to p_n and the row is counted.
// Row i uses Rng(split_seed(seed, i)) so rows are independent of each other.
inline AssembledTable assemble_probability_table(const std::vector<FeatureVector>& features,
                                                 const LogisticModel& model_none, const LogisticModel& model_call,
                                                 const UntestedConstants& constants, std::uint64_t seed) {
  if (constants.drive < 0.0 || constants.drive > 1.0 ||
      (constants.voucher && constants.bus && *constants.voucher > *constants.bus) ||
      (constants.bus && *constants.bus > constants.drive) ||
      (constants.voucher && *constants.voucher > constants.drive))
    throw ConfigError("untested-intervention constants violate the probability ordering");
  AssembledTable out;
  out.table.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    Rng rng(split_seed(seed, i));
    const double pn = predict_probability(model_none, features[i]);
    double pc = predict_probability(model_call, features[i]);
    if (pc < pn) {
      pc = pn;
      ++out.clamped;
    }
    out.table.push_back(complete_row(pn, pc, constants, rng));
  }
  return out;
}

}  // namespace adviser
