#include "ibinet/postprocess.hpp"

#include <algorithm>
#include <map>

namespace ibinet {

namespace {

/// Splits a series into maximal runs of consecutive beat indices and applies
/// `filter_run` to each.
template <typename F>
IbiSeries per_run(const IbiSeries& series, F filter_run) {
  IbiSeries out;
  out.reserve(series.size());
  std::size_t start = 0;
  for (std::size_t i = 1; i <= series.size(); ++i) {
    if (i == series.size() || series[i].beat_index != series[i - 1].beat_index + 1) {
      filter_run(series, start, i, out);
      start = i;
    }
  }
  return out;
}

}  // namespace

IbiSeries rolling_average(const WindowPredictions& preds) {
  for (std::size_t i = 1; i < preds.size(); ++i)
    if (preds[i].first_beat_index <= preds[i - 1].first_beat_index)
      throw DataError("rolling_average: window first_beat_index not strictly increasing");

  std::map<std::int64_t, std::pair<double, int>> acc;  // beat -> (sum, count)
  for (const auto& w : preds)
    for (int s = 0; s < kTargetsPerWindow; ++s) {
      auto& slot = acc[w.first_beat_index + s];
      slot.first += w.ibis[static_cast<std::size_t>(s)];
      slot.second += 1;
    }
  IbiSeries out;
  out.reserve(acc.size());
  for (const auto& [beat, sum_count] : acc)
    out.push_back({beat, sum_count.first / sum_count.second});
  return out;
}

IbiSeries median_filter(const IbiSeries& series, int length) {
  if (length < 1 || length % 2 == 0)
    throw ParameterError("median_filter: length must be odd and positive");
  const std::size_t half = static_cast<std::size_t>(length) / 2;
  return per_run(series, [&](const IbiSeries& s, std::size_t lo, std::size_t hi,
                             IbiSeries& out) {
    std::vector<double> window;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t w_lo = i >= lo + half ? i - half : lo;
      const std::size_t w_hi = std::min(hi, i + half + 1);
      window.clear();
      for (std::size_t k = w_lo; k < w_hi; ++k) window.push_back(s[k].ibi_seconds);
      std::sort(window.begin(), window.end());
      const std::size_t n = window.size();
      const double med =
          n % 2 ? window[n / 2] : 0.5 * (window[n / 2 - 1] + window[n / 2]);
      out.push_back({s[i].beat_index, med});
    }
  });
}

IbiSeries moving_average(const IbiSeries& series, int length) {
  if (length < 1) throw ParameterError("moving_average: length must be positive");
  const auto span = static_cast<std::size_t>(length);
  return per_run(series, [&](const IbiSeries& s, std::size_t lo, std::size_t hi,
                             IbiSeries& out) {
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t w_lo = i + 1 >= lo + span ? i + 1 - span : lo;
      double sum = 0;
      for (std::size_t k = w_lo; k <= i; ++k) sum += s[k].ibi_seconds;
      out.push_back({s[i].beat_index, sum / static_cast<double>(i - w_lo + 1)});
    }
  });
}

IbiSeries postprocess_pipeline(const WindowPredictions& preds) {
  return moving_average(median_filter(rolling_average(preds), 5), 6);
}

}  // namespace ibinet
