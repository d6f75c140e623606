#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "ibinet/tensor.hpp"

namespace ibinet {

/// Weights of the four-term training loss:
/// L = w1*(1 - r^2) + w2*Huber + w3*MSE + w4*MAE.
struct LossWeights {
  double w1 = 0.002;
  double w2 = 1.0032;
  double w3 = 0.0096;
  double w4 = 0.002;
  double huber_delta = 1.0;

  void validate() const {
    if (w1 < 0 || w2 < 0 || w3 < 0 || w4 < 0)
      throw ParameterError("loss weights must be nonnegative");
    if (w1 + w2 + w3 + w4 <= 0) throw ParameterError("at least one loss weight must be > 0");
    if (huber_delta <= 0) throw ParameterError("huber_delta must be positive");
  }
};

/// Weights of the checkpoint-selection metric:
/// M = a1*(1 - r^2) + a2*mean(eps^2) + a3*mean(|eps|); lower is better.
struct MetricWeights {
  double alpha1 = 10.0;
  double alpha2 = 0.1;
  double alpha3 = 0.1;
};

struct BlandAltmanStats {
  double mean_diff = 0;
  double loa_low = 0;
  double loa_high = 0;
  std::size_t n = 0;
};

enum class BlandAltmanUnit { kSeconds, kBpm };

inline double ibi_to_bpm(double ibi_seconds) {
  if (ibi_seconds <= 0) throw ParameterError("ibi_to_bpm: IBI must be positive");
  return 60.0 / ibi_seconds;
}

namespace detail {

struct CenteredSums {
  double mean_x = 0, mean_y = 0;
  double sxx = 0, syy = 0, sxy = 0;
  std::size_t n = 0;
};

/// Two-pass centered sums in 64-bit accumulation.
template <typename GetX, typename GetY>
CenteredSums centered_sums(GetX x, GetY y, std::size_t n) {
  CenteredSums s;
  s.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    s.mean_x += x(i);
    s.mean_y += y(i);
  }
  s.mean_x /= static_cast<double>(n);
  s.mean_y /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x(i) - s.mean_x;
    const double b = y(i) - s.mean_y;
    s.sxx += a * a;
    s.syy += b * b;
    s.sxy += a * b;
  }
  return s;
}

/// A series is degenerate when its variance is zero to within rounding of an
/// exactly constant input.
inline bool degenerate(double s, double mean, std::size_t n) {
  return s <= static_cast<double>(n) * 1e-18 * (1.0 + mean * mean);
}

}  // namespace detail

/// Pearson correlation coefficient, 64-bit accumulation.
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ParameterError("pearson_r: length mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  if (x.size() < 2) throw ParameterError("pearson_r: need at least 2 points");
  const auto s =
      detail::centered_sums([&](std::size_t i) { return x[i]; },
                            [&](std::size_t i) { return y[i]; }, x.size());
  if (detail::degenerate(s.sxx, s.mean_x, s.n) || detail::degenerate(s.syy, s.mean_y, s.n))
    throw DegenerateSeries("pearson_r: zero variance series");
  return s.sxy / std::sqrt(s.sxx * s.syy);
}

/// Root-mean-square error in the units of the inputs.
inline double rmse(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ParameterError("rmse: length mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  if (x.empty()) throw ParameterError("rmse: empty series");
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double huber_term(double eps, double delta) {
  const double a = std::abs(eps);
  return a <= delta ? 0.5 * eps * eps : delta * (a - 0.5 * delta);
}

inline double huber_term_derivative(double eps, double delta) {
  if (eps > delta) return delta;
  if (eps < -delta) return -delta;
  return eps;
}

/// Mean Huber loss between two series.
inline double huber(std::span<const double> pred, std::span<const double> target,
                    double delta = 1.0) {
  if (pred.size() != target.size())
    throw ParameterError("huber: length mismatch " + std::to_string(pred.size()) + " vs " +
                         std::to_string(target.size()));
  if (pred.empty()) throw ParameterError("huber: empty series");
  double acc = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    acc += huber_term(pred[i] - target[i], delta);
  return acc / static_cast<double>(pred.size());
}

/// Checkpoint-selection metric; lower is better.
inline double weighted_metric(std::span<const double> pred, std::span<const double> target,
                              const MetricWeights& w = {}) {
  const double r = pearson_r(pred, target);
  double mse = 0, mae = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    mse += e * e;
    mae += std::abs(e);
  }
  const double n = static_cast<double>(pred.size());
  return w.alpha1 * (1.0 - r * r) + w.alpha2 * mse / n + w.alpha3 * mae / n;
}

/// Agreement statistics: mean difference and mean +- 1.96 * sample std.
inline BlandAltmanStats bland_altman(std::span<const double> pred,
                                     std::span<const double> target,
                                     BlandAltmanUnit unit = BlandAltmanUnit::kSeconds) {
  if (pred.size() != target.size())
    throw ParameterError("bland_altman: length mismatch " + std::to_string(pred.size()) +
                         " vs " + std::to_string(target.size()));
  if (pred.size() < 2) throw ParameterError("bland_altman: need at least 2 points");
  const std::size_t n = pred.size();
  double sum = 0;
  std::vector<double> diffs(n);
  for (std::size_t i = 0; i < n; ++i) {
    diffs[i] = unit == BlandAltmanUnit::kBpm ? ibi_to_bpm(pred[i]) - ibi_to_bpm(target[i])
                                             : pred[i] - target[i];
    sum += diffs[i];
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, mean - 1.96 * sd, mean + 1.96 * sd, n};
}

template <typename Scalar>
struct LossResult {
  double value = 0;
  Tensor<Scalar> grad;  // d value / d pred
};

/// Weighted training loss over a prediction batch, with its analytic gradient.
/// The Pearson term pools all batch*width (pred, target) pairs. All
/// reductions are means, and all accumulation is in 64-bit.
template <typename Scalar>
LossResult<Scalar> weighted_loss(const Tensor<Scalar>& pred, const Tensor<Scalar>& target,
                                 const LossWeights& w = {}) {
  w.validate();
  require_same_shape(pred, target, "weighted_loss");
  if (pred.rank() != 2) throw ShapeError("weighted_loss: expected [batch, width] tensors");
  if (pred.dim(0) < 2)
    throw ParameterError("weighted_loss: batch must be >= 2, got " +
                         std::to_string(pred.dim(0)));
  const std::size_t n = static_cast<std::size_t>(pred.size());
  const double dn = static_cast<double>(n);

  double mse = 0, mae = 0, hl = 0;
  LossResult<Scalar> out;
  out.grad = Tensor<Scalar>(pred.shape());
  for (std::size_t i = 0; i < n; ++i) {
    const double e = static_cast<double>(pred.array()[static_cast<Index>(i)]) -
                     static_cast<double>(target.array()[static_cast<Index>(i)]);
    mse += e * e;
    mae += std::abs(e);
    hl += huber_term(e, w.huber_delta);
    double g = w.w2 * huber_term_derivative(e, w.huber_delta) + w.w3 * 2.0 * e +
               w.w4 * (e > 0 ? 1.0 : (e < 0 ? -1.0 : 0.0));
    out.grad.array()[static_cast<Index>(i)] = static_cast<Scalar>(g / dn);
  }
  mse /= dn;
  mae /= dn;
  hl /= dn;
  out.value = w.w2 * hl + w.w3 * mse + w.w4 * mae;

  if (w.w1 > 0) {
    const auto s = detail::centered_sums(
        [&](std::size_t i) { return static_cast<double>(pred.array()[static_cast<Index>(i)]); },
        [&](std::size_t i) {
          return static_cast<double>(target.array()[static_cast<Index>(i)]);
        },
        n);
    if (detail::degenerate(s.syy, s.mean_y, n))
      throw DegenerateSeries("weighted_loss: constant targets");
    if (detail::degenerate(s.sxx, s.mean_x, n))
      throw DegenerateSeries("weighted_loss: constant predictions");
    const double denom = std::sqrt(s.sxx * s.syy);
    const double r = s.sxy / denom;
    out.value += w.w1 * (1.0 - r * r);
    // d(1-r^2)/dx_i = -2r * (b_i / sqrt(Sxx*Syy) - r * a_i / Sxx)
    for (std::size_t i = 0; i < n; ++i) {
      const double a = static_cast<double>(pred.array()[static_cast<Index>(i)]) - s.mean_x;
      const double b = static_cast<double>(target.array()[static_cast<Index>(i)]) - s.mean_y;
      const double dr = b / denom - r * a / s.sxx;
      out.grad.array()[static_cast<Index>(i)] += static_cast<Scalar>(w.w1 * -2.0 * r * dr);
    }
  }
  return out;
}

/// One row of the evaluation report.
struct MetricRow {
  int fold_id = 0;
  std::string stage;  // "raw" | "postprocessed"
  double r_percent = 0;
  double rmse_ms = 0;
  double ba_mean_ms = 0;
  double ba_loa_low_ms = 0;
  double ba_loa_high_ms = 0;
  std::size_t n_ibis = 0;
};

}  // namespace ibinet
