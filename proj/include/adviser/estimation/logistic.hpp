#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "adviser/core/error.hpp"
#include "adviser/core/types.hpp"

namespace adviser {

// Encoded design row: [1, income, age, reminder, vaccinated], every entry in
// [0, 1] except that child age saturates at two years.
inline constexpr std::size_t kFeatureDim = 4;

inline std::vector<double> encode_features(const FeatureVector& f) {
  const double income = static_cast<double>(f.income_level) / static_cast<double>(kIncomeLevels - 1);
  const double age = std::min(1.0, static_cast<double>(f.child_age_months) / 24.0);
  return {1.0, income, age, f.prior_reminder ? 1.0 : 0.0, f.prior_vaccination ? 1.0 : 0.0};
}

struct LogisticConfig {
  double l2 = 1e-4;
  double learning_rate = 0.1;
  int max_iterations = 5000;
  double tolerance = 1e-7;  // on the gradient's Euclidean norm
};

struct LogisticModel {
  std::vector<double> weights;  // weights[0] is the intercept
  int iterations = 0;
  double final_loss = 0.0;
  std::vector<double> loss_trace;  // loss before each update, then the final loss
};

struct LabeledRow {
  FeatureVector features;
  bool label = false;
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Mean negative log-likelihood plus (l2/2)·||w||² over the non-intercept
// weights.
inline double log_loss(const std::vector<double>& w, const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = dot(w, x[i]);
    // log(1 + e^z) - y z, written to avoid overflow.
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - y[i] * z;
  }
  loss /= static_cast<double>(x.size());
  double reg = 0.0;
  for (std::size_t j = 1; j < w.size(); ++j) reg += w[j] * w[j];
  return loss + 0.5 * l2 * reg;
}

inline std::vector<double> log_loss_gradient(const std::vector<double>& w, const std::vector<std::vector<double>>& x,
                                             const std::vector<double>& y, double l2) {
  std::vector<double> g(w.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = sigmoid(dot(w, x[i])) - y[i];
    for (std::size_t j = 0; j < w.size(); ++j) g[j] += r * x[i][j];
  }
  for (auto& v : g) v /= static_cast<double>(x.size());
  for (std::size_t j = 1; j < w.size(); ++j) g[j] += l2 * w[j];
  return g;
}

// Full-batch gradient descent on encoded rows.
inline LogisticModel fit_logistic_encoded(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                          const LogisticConfig& cfg = {}) {
  if (x.size() < 2) throw InputError("degenerate labels: need at least two rows");
  bool pos = false, neg = false;
  for (double v : y) (v > 0.5 ? pos : neg) = true;
  if (!pos || !neg) throw InputError("degenerate labels: both classes must be present");
  for (const auto& row : x) {
    if (row.size() != x.front().size()) throw InputError("ragged feature rows");
    for (double v : row)
      if (!std::isfinite(v)) throw InputError("non-finite feature value");
  }

  LogisticModel m;
  m.weights.assign(x.front().size(), 0.0);
  for (m.iterations = 0; m.iterations < cfg.max_iterations; ++m.iterations) {
    const auto g = log_loss_gradient(m.weights, x, y, cfg.l2);
    if (std::sqrt(dot(g, g)) <= cfg.tolerance) break;
    m.loss_trace.push_back(log_loss(m.weights, x, y, cfg.l2));
    for (std::size_t j = 0; j < g.size(); ++j) m.weights[j] -= cfg.learning_rate * g[j];
  }
  m.final_loss = log_loss(m.weights, x, y, cfg.l2);
  m.loss_trace.push_back(m.final_loss);
  return m;
}

inline LogisticModel fit_logistic(const std::vector<LabeledRow>& rows, const LogisticConfig& cfg = {}) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(rows.size());
  y.reserve(rows.size());
  for (const auto& r : rows) {
    x.push_back(encode_features(r.features));
    y.push_back(r.label ? 1.0 : 0.0);
  }
  return fit_logistic_encoded(x, y, cfg);
}

inline double predict_probability(const LogisticModel& m, const std::vector<double>& encoded) {
  if (encoded.size() != m.weights.size())
    throw InputError("feature dimension " + std::to_string(encoded.size()) + " does not match model dimension " +
                     std::to_string(m.weights.size()));
  // Keep the output strictly inside (0, 1) even when the score saturates.
  return std::clamp(sigmoid(dot(m.weights, encoded)), 1e-15, 1.0 - 1e-15);
}

inline double predict_probability(const LogisticModel& m, const FeatureVector& f) {
  return predict_probability(m, encode_features(f));
}

}  // namespace adviser
