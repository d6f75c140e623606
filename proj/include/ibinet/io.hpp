#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ibinet/lossmetrics.hpp"
#include "ibinet/postprocess.hpp"
#include "ibinet/signal.hpp"
#include "ibinet/windowing.hpp"

namespace ibinet {

/// A prepared dataset: every subject's windows plus the fold split that
/// assigns each subject to exactly one partition. Augmented windows carry
/// their source subject's id, so the split remains the partition audit.
struct PreparedDataset {
  std::int64_t window_length = 4910;
  int target_count = kTargetsPerWindow;
  FoldSplit split;
  std::vector<WindowSample> records;

  enum class Partition { kTrain, kVal, kTest };
  Partition partition_of(int subject_id) const;
  std::vector<std::size_t> indices_of(Partition p) const;
};

// .sig (little-endian f32 samples behind an IBSG header) plus a sibling .rpk
// text file of peak indices.
void write_signal(const AnnotatedSignal& signal, const std::filesystem::path& basename);
AnnotatedSignal read_signal(const std::filesystem::path& sig_path);

/// All .sig files under a directory, sorted by filename.
std::vector<std::filesystem::path> list_signal_files(const std::filesystem::path& dir);

// Record-oriented IBWD binary.
void write_prepared(const PreparedDataset& data, const std::filesystem::path& path);
PreparedDataset read_prepared(const std::filesystem::path& path);

// IBI series CSV: "beat_index,ibi_seconds".
void write_ibi_csv(const IbiSeries& series, const std::filesystem::path& path);
IbiSeries read_ibi_csv(const std::filesystem::path& path);

// Metric report CSV with the fixed header:
// fold_id,stage,r_percent,rmse_ms,ba_mean_ms,ba_loa_low_ms,ba_loa_high_ms,n_ibis
extern const char* const kMetricCsvHeader;
void write_metric_csv(const std::vector<MetricRow>& rows, const std::filesystem::path& path);

/// JSON array of subject profiles.
std::vector<SubjectProfile> read_profiles_json(const std::filesystem::path& path);
void write_profiles_json(const std::vector<SubjectProfile>& profiles,
                         const std::filesystem::path& path);

}  // namespace ibinet
