#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ibinet/rng.hpp"
#include "ibinet/signal.hpp"

namespace ibinet {

inline constexpr int kPeaksPerWindow = 8;
inline constexpr int kTargetsPerWindow = 7;

/// Fixed-size window geometry. The defaults are tuned for 500 Hz recordings;
/// both lengths are configuration keys so other modalities can adjust them.
struct WindowingConfig {
  std::int64_t window_length = 4910;
  std::int64_t max_segment_length = 4885;
};

/// One training sample: a zero-padded segment spanning 8 consecutive R-peaks
/// and its 7 IBI targets.
struct WindowSample {
  std::vector<float> input;                        // window_length samples
  std::array<float, kTargetsPerWindow> targets{};  // seconds
  int subject_id = 0;
  std::int64_t first_beat_index = 0;  // global index of the window's first R-peak
  int pad_left = 0;
};

struct FoldSplit {
  int fold_id = 0;
  std::vector<int> train_subjects;
  std::vector<int> val_subjects;
  std::vector<int> test_subjects;
};

/// Rolling-window extraction at a stride of one R-peak: window j spans peaks
/// j..j+7, its boundaries drawn uniformly between the neighboring peaks (or
/// the recording edges). Segments longer than max_segment_length are dropped;
/// `discarded` (optional) receives the drop count.
std::vector<WindowSample> extract_windows(const AnnotatedSignal& signal, std::uint64_t seed,
                                          const WindowingConfig& config = {},
                                          int* discarded = nullptr);

/// Zero-pads a segment to window_length with a uniformly drawn left offset.
std::pair<std::vector<float>, int> pad_window(std::span<const float> segment, Rng& rng,
                                              const WindowingConfig& config = {});
std::pair<std::vector<float>, int> pad_window(std::span<const float> segment,
                                              std::uint64_t seed,
                                              const WindowingConfig& config = {});

/// Z-scores the nonzero (unpadded) region in place; padding stays exactly
/// zero. A region with standard deviation under 1e-8 is zeroed instead.
void normalize_window_inplace(std::span<float> window);
std::vector<float> normalize_window(std::span<const float> window);

/// Leave-one-subject-out split: test = {fold_id}, validation subjects chosen
/// pseudo-randomly from (seed, fold_id) among the rest (2 of 10 at the
/// 11-subject population, otherwise ~20% of the remainder, at least 1).
FoldSplit make_folds(const std::vector<int>& subject_ids, int fold_id, std::uint64_t seed);

}  // namespace ibinet
