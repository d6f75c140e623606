#include "ibinet/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace ibinet {

std::vector<WindowSample> extract_windows(const AnnotatedSignal& signal, std::uint64_t seed,
                                          const WindowingConfig& config, int* discarded) {
  const auto& peaks = signal.r_peaks;
  const auto n_peaks = static_cast<std::int64_t>(peaks.size());
  if (n_peaks < kPeaksPerWindow)
    throw EmptyWindowSet("extract_windows: " + std::to_string(n_peaks) +
                         " R-peaks cannot form a window of " +
                         std::to_string(kPeaksPerWindow));
  const auto len = static_cast<std::int64_t>(signal.samples.size());

  Rng rng(seed);
  std::vector<WindowSample> windows;
  windows.reserve(static_cast<std::size_t>(n_peaks - kPeaksPerWindow + 1));
  int dropped = 0;
  for (std::int64_t j = 0; j + kPeaksPerWindow <= n_peaks; ++j) {
    const std::int64_t last = j + kPeaksPerWindow - 1;
    // Left boundary strictly between peak j-1 and peak j (from the recording
    // start for the first window); right boundary symmetrically.
    const std::int64_t lo_s = j == 0 ? 0 : peaks[static_cast<std::size_t>(j - 1)] + 1;
    const std::int64_t hi_s = peaks[static_cast<std::size_t>(j)] - 1;
    const std::int64_t start =
        lo_s > hi_s ? peaks[static_cast<std::size_t>(j)] : rng.uniform_int(lo_s, hi_s);
    const std::int64_t lo_e = peaks[static_cast<std::size_t>(last)] + 1;
    const std::int64_t hi_e =
        last + 1 < n_peaks ? peaks[static_cast<std::size_t>(last + 1)] - 1 : len - 1;
    const std::int64_t end =
        lo_e > hi_e ? peaks[static_cast<std::size_t>(last)] : rng.uniform_int(lo_e, hi_e);

    const std::int64_t seg_len = end - start + 1;
    if (seg_len > config.max_segment_length) {
      ++dropped;
      continue;
    }

    WindowSample w;
    w.subject_id = signal.subject_id;
    w.first_beat_index = j;
    const std::span<const float> segment(signal.samples.data() + start,
                                         static_cast<std::size_t>(seg_len));
    auto [padded, pad_left] = pad_window(segment, rng, config);
    w.input = std::move(padded);
    w.pad_left = pad_left;
    for (int i = 0; i < kTargetsPerWindow; ++i)
      w.targets[static_cast<std::size_t>(i)] = static_cast<float>(
          static_cast<double>(peaks[static_cast<std::size_t>(j + i + 1)] -
                              peaks[static_cast<std::size_t>(j + i)]) /
          signal.fs);
    windows.push_back(std::move(w));
  }
  if (dropped > 0)
    std::cerr << "[ibinet] warning: discarded " << dropped << " oversize window(s) (subject "
              << signal.subject_id << ")\n";
  if (discarded) *discarded = dropped;
  return windows;
}

std::pair<std::vector<float>, int> pad_window(std::span<const float> segment, Rng& rng,
                                              const WindowingConfig& config) {
  const auto seg_len = static_cast<std::int64_t>(segment.size());
  if (seg_len > config.window_length)
    throw OversizeWindow("pad_window: segment of " + std::to_string(seg_len) +
                         " samples exceeds window length " +
                         std::to_string(config.window_length));
  const std::int64_t slack = config.window_length - seg_len;
  const auto pad_left = static_cast<int>(slack == 0 ? 0 : rng.uniform_int(0, slack));
  std::vector<float> padded(static_cast<std::size_t>(config.window_length), 0.0f);
  std::copy(segment.begin(), segment.end(),
            padded.begin() + static_cast<std::ptrdiff_t>(pad_left));
  return {std::move(padded), pad_left};
}

std::pair<std::vector<float>, int> pad_window(std::span<const float> segment,
                                              std::uint64_t seed,
                                              const WindowingConfig& config) {
  Rng rng(seed);
  return pad_window(segment, rng, config);
}

void normalize_window_inplace(std::span<float> window) {
  // The unpadded region is the span from the first to the last nonzero
  // sample; statistics over it exclude the random padding by construction.
  std::size_t first = window.size(), last = 0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (window[i] != 0.0f) {
      if (first == window.size()) first = i;
      last = i;
    }
  }
  if (first == window.size()) return;  // all zeros

  const std::size_t n = last - first + 1;
  double sum = 0;
  for (std::size_t i = first; i <= last; ++i) sum += window[i];
  const double mean = sum / static_cast<double>(n);
  double ss = 0;
  for (std::size_t i = first; i <= last; ++i) {
    const double d = window[i] - mean;
    ss += d * d;
  }
  const double std_dev = std::sqrt(ss / static_cast<double>(n));
  if (std_dev < 1e-8) {
    for (std::size_t i = first; i <= last; ++i) window[i] = 0.0f;
    return;
  }
  for (std::size_t i = first; i <= last; ++i)
    window[i] = static_cast<float>((window[i] - mean) / std_dev);
}

std::vector<float> normalize_window(std::span<const float> window) {
  std::vector<float> out(window.begin(), window.end());
  normalize_window_inplace(out);
  return out;
}

FoldSplit make_folds(const std::vector<int>& subject_ids, int fold_id, std::uint64_t seed) {
  std::vector<int> rest;
  bool found = false;
  for (int id : subject_ids) {
    if (id == fold_id)
      found = true;
    else
      rest.push_back(id);
  }
  if (!found)
    throw ParameterError("make_folds: fold_id " + std::to_string(fold_id) +
                         " is not a subject id");
  std::sort(rest.begin(), rest.end());
  rest.erase(std::unique(rest.begin(), rest.end()), rest.end());

  // Deterministic shuffle keyed on (seed, fold_id); first ~20% (at least one)
  // become the validation subjects.
  Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(fold_id)));
  for (std::size_t i = rest.size(); i > 1; --i)
    std::swap(rest[i - 1], rest[static_cast<std::size_t>(rng.uniform_int(
                  0, static_cast<std::int64_t>(i) - 1))]);

  const std::size_t n_val =
      std::max<std::size_t>(1, rest.size() / 5);
  FoldSplit split;
  split.fold_id = fold_id;
  split.test_subjects = {fold_id};
  split.val_subjects.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.train_subjects.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val), rest.end());
  std::sort(split.val_subjects.begin(), split.val_subjects.end());
  std::sort(split.train_subjects.begin(), split.train_subjects.end());
  return split;
}

}  // namespace ibinet
