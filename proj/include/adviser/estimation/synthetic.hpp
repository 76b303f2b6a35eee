#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/core/grid.hpp"
#include "adviser/core/random.hpp"
#include "adviser/core/types.hpp"
#include "adviser/estimation/logistic.hpp"
#include "adviser/estimation/probability.hpp"

namespace adviser {

enum class Dataset { D1, D2 };

// Where synthetic mothers live and when they can be served. Mothers cluster
// in settlements (isotropic Gaussian blobs) with a uniform background.
struct PopulationLayout {
  GeoPoint south_west{7.3235, 3.8926};  // 6 km south-west of central Ibadan
  double width_km = 12.0;
  double height_km = 12.0;
  double cell_km = 1.0;
  int horizon = 30;
  int settlements = 0;  // 0: one per 200 mothers, at least 4
  double settlement_spread_km = 0.6;
  double settlement_margin_km = 1.5;
  double background_fraction = 0.03;
  int min_window_days = 20;
  int max_window_days = 30;
  int pickup_earliest_from = 420;
  int pickup_earliest_to = 540;
  int pickup_span_from = 60;
  int pickup_span_to = 180;
};

inline Grid layout_grid(const PopulationLayout& l) {
  return Grid(l.south_west, static_cast<int>(std::ceil(l.height_km / l.cell_km - 1e-9)),
              static_cast<int>(std::ceil(l.width_km / l.cell_km - 1e-9)), l.cell_km);
}

// D2 label protocol: features drawn like the population, labels i.i.d.
// Bernoulli(vaccination_rate), first (1 - holdout) of the pool used for
// training.
struct D2Protocol {
  double vaccination_rate = 0.04;
  int pool_size = 1000;
  double holdout_fraction = 0.2;
  LogisticConfig logistic;
};

struct SyntheticSpec {
  Dataset dataset = Dataset::D1;
  int population_size = 2000;
  std::uint64_t seed = 1;
  std::vector<FeatureVector> source_pool;
  PopulationLayout layout;
  D2Protocol d2;
  UntestedConstants constants;
};

struct D2Report {
  LogisticModel model_none;  // trained on rows without a prior reminder call
  LogisticModel model_call;  // trained on rows with one
  int train_rows = 0;
  int holdout_rows = 0;
  double holdout_error = 0.0;
  double bayes_rate = 0.0;
  int clamped = 0;
};

struct Population {
  std::vector<Mother> mothers;
  ProbabilityTable table;
  std::optional<D2Report> d2;
};

// Stand-in for the 500-row registry extract: every column independent.
inline std::vector<FeatureVector> default_source_pool(std::uint64_t seed = 500, int rows = 500) {
  Rng rng(seed);
  std::vector<FeatureVector> pool(static_cast<std::size_t>(rows));
  for (auto& f : pool) {
    f.income_level = rng.uniform_int(0, kIncomeLevels - 1);
    f.child_age_months = rng.uniform_int(0, 23);
    f.prior_reminder = rng.bernoulli(0.5);
    f.prior_vaccination = rng.bernoulli(0.6);
  }
  return pool;
}

// Each feature taken from an independently chosen pool row.
inline FeatureVector sample_features(const std::vector<FeatureVector>& pool, Rng& rng) {
  auto pick = [&]() -> const FeatureVector& { return pool[rng.below(pool.size())]; };
  FeatureVector f;
  f.income_level = pick().income_level;
  f.child_age_months = pick().child_age_months;
  f.prior_reminder = pick().prior_reminder;
  f.prior_vaccination = pick().prior_vaccination;
  return f;
}

namespace detail {
inline constexpr std::uint64_t kLayoutStream = 1, kMotherStream = 2, kPoolStream = 3, kProbStream = 4;
}

inline D2Report train_d2_models(const SyntheticSpec& spec) {
  Rng rng(split_seed(spec.seed, detail::kPoolStream));
  std::vector<LabeledRow> rows(static_cast<std::size_t>(spec.d2.pool_size));
  for (auto& r : rows) {
    r.features = sample_features(spec.source_pool, rng);
    r.label = rng.bernoulli(spec.d2.vaccination_rate);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(rows.size() * (1.0 - spec.d2.holdout_fraction)));
  std::vector<LabeledRow> none_rows, call_rows;
  for (std::size_t i = 0; i < n_train; ++i) (rows[i].features.prior_reminder ? call_rows : none_rows).push_back(rows[i]);
  D2Report rep;
  rep.model_none = fit_logistic(none_rows, spec.d2.logistic);
  rep.model_call = fit_logistic(call_rows, spec.d2.logistic);
  rep.train_rows = static_cast<int>(n_train);
  rep.holdout_rows = static_cast<int>(rows.size() - n_train);
  int wrong = 0;
  for (std::size_t i = n_train; i < rows.size(); ++i) {
    const auto& m = rows[i].features.prior_reminder ? rep.model_call : rep.model_none;
    wrong += (predict_probability(m, rows[i].features) >= 0.5) != rows[i].label;
  }
  rep.holdout_error = rep.holdout_rows ? static_cast<double>(wrong) / rep.holdout_rows : 0.0;
  rep.bayes_rate = std::min(spec.d2.vaccination_rate, 1.0 - spec.d2.vaccination_rate);
  return rep;
}

inline std::vector<PlanarPoint> settlement_centers(const SyntheticSpec& spec, std::vector<double>& weights) {
  const auto& l = spec.layout;
  const int n = l.settlements > 0 ? l.settlements : std::max(4, (spec.population_size + 100) / 200);
  Rng rng(split_seed(spec.seed, detail::kLayoutStream));
  std::vector<PlanarPoint> out;
  weights.clear();
  const double mx = std::min(l.settlement_margin_km, l.width_km / 2), my = std::min(l.settlement_margin_km, l.height_km / 2);
  for (int i = 0; i < n; ++i) {
    out.push_back({rng.uniform(mx, l.width_km - mx), rng.uniform(my, l.height_km - my)});
    weights.push_back(rng.uniform(0.5, 1.5));
  }
  return out;
}

inline Population generate_population(const SyntheticSpec& spec) {
  if (spec.population_size < 1) throw InputError("population size must be at least 1");
  if (spec.source_pool.empty()) throw InputError("empty source pool");
  const auto& l = spec.layout;
  if (l.min_window_days < 1 || l.min_window_days > l.max_window_days || l.max_window_days > l.horizon)
    throw ConfigError("eligibility window lengths must satisfy 1 <= min <= max <= horizon");

  Population pop;
  if (spec.dataset == Dataset::D2) pop.d2 = train_d2_models(spec);

  const Grid grid = layout_grid(l);
  const LocalProjection proj = grid.projection();
  std::vector<double> weights;
  const auto centers = settlement_centers(spec, weights);
  double total_weight = 0;
  for (double w : weights) total_weight += w;

  pop.mothers.resize(static_cast<std::size_t>(spec.population_size));
  pop.table.resize(pop.mothers.size());
  std::vector<FeatureVector> feats(pop.mothers.size());
  const std::uint64_t mother_seed = split_seed(spec.seed, detail::kMotherStream);
  for (std::size_t i = 0; i < pop.mothers.size(); ++i) {
    Rng rng(split_seed(mother_seed, i));
    Mother& m = pop.mothers[i];
    m.id = static_cast<int>(i) + 1;
    m.features = feats[i] = sample_features(spec.source_pool, rng);

    PlanarPoint q;
    if (rng.bernoulli(l.background_fraction)) {
      q = {rng.uniform(0, l.width_km), rng.uniform(0, l.height_km)};
    } else {
      double u = rng.uniform(0, total_weight);
      std::size_t s = 0;
      while (s + 1 < weights.size() && u >= weights[s]) u -= weights[s++];
      for (int attempt = 0; attempt < 10; ++attempt) {
        q = {centers[s].x + l.settlement_spread_km * rng.normal(), centers[s].y + l.settlement_spread_km * rng.normal()};
        if (q.x >= 0 && q.x < l.width_km && q.y >= 0 && q.y < l.height_km) break;
      }
      q.x = std::clamp(q.x, 1e-6, l.width_km - 1e-6);
      q.y = std::clamp(q.y, 1e-6, l.height_km - 1e-6);
    }
    m.location = proj.unproject(q);
    m.cell = grid.cell_of(m.location);

    const int len = rng.uniform_int(l.min_window_days, l.max_window_days);
    m.eligibility.first_day = rng.uniform_int(1, l.horizon - len + 1);
    m.eligibility.last_day = m.eligibility.first_day + len - 1;
    m.pickup_window.earliest = rng.uniform_int(l.pickup_earliest_from, l.pickup_earliest_to);
    m.pickup_window.latest = m.pickup_window.earliest + rng.uniform_int(l.pickup_span_from, l.pickup_span_to);
  }

  const std::uint64_t prob_seed = split_seed(spec.seed, detail::kProbStream);
  if (spec.dataset == Dataset::D1) {
    for (std::size_t i = 0; i < pop.table.size(); ++i) {
      Rng rng(split_seed(prob_seed, i));
      pop.table[i] = sample_chained(rng);
    }
  } else {
    auto assembled =
        assemble_probability_table(feats, pop.d2->model_none, pop.d2->model_call, spec.constants, prob_seed);
    pop.table = std::move(assembled.table);
    pop.d2->clamped = assembled.clamped;
  }
  return pop;
}

}  // namespace adviser
