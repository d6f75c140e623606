#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ibinet/windowing.hpp"

namespace ibinet {

/// The 7 IBI predictions of one rolling window; slot s addresses beat
/// first_beat_index + s.
struct WindowPrediction {
  std::int64_t first_beat_index = 0;
  std::array<double, kTargetsPerWindow> ibis{};
};

/// Ordered per-recording predictions. first_beat_index advances by 1 between
/// neighbors except across gaps left by discarded windows.
using WindowPredictions = std::vector<WindowPrediction>;

struct IbiPoint {
  std::int64_t beat_index = 0;
  double ibi_seconds = 0;
};

/// Per-beat IBI series ordered by beat index; beats no window addressed are
/// simply absent, splitting the series into contiguous runs.
using IbiSeries = std::vector<IbiPoint>;

/// Overlap averaging: every (window, slot) pair addressing beat k is
/// averaged, so an interior beat combines the 7 predictions it received and
/// edge beats their m < 7 available ones.
IbiSeries rolling_average(const WindowPredictions& preds);

/// Centered median filter with shrunken (clipped) windows at the series
/// boundaries; runs separated by beat-index gaps are filtered independently.
IbiSeries median_filter(const IbiSeries& series, int length = 5);

/// Trailing moving average, shrinking at the start of each contiguous run.
IbiSeries moving_average(const IbiSeries& series, int length = 6);

/// rolling_average, then median_filter(5), then moving_average(6).
IbiSeries postprocess_pipeline(const WindowPredictions& preds);

}  // namespace ibinet
