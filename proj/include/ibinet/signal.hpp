#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibinet/errors.hpp"

namespace ibinet {

enum class PulseTemplate { kGaussianDerivative, kDampedSinusoid, kBiphasic };

/// Statistical description of one synthetic subject's heartbeat stream.
struct SubjectProfile {
  int subject_id = 0;
  double ibi_mean = 0.7;   // seconds
  double ibi_std = 0.04;   // seconds
  double ibi_min = 0.4;    // seconds
  double ibi_max = 1.3;    // seconds
  PulseTemplate pulse_template = PulseTemplate::kGaussianDerivative;
  double noise_std = 0.03;  // fraction of the template peak amplitude
  double duration = 300.0;  // seconds

  void validate() const {
    if (!(ibi_min > 0 && ibi_min <= ibi_mean && ibi_mean <= ibi_max))
      throw ParameterError("SubjectProfile: need 0 < ibi_min <= ibi_mean <= ibi_max (subject " +
                           std::to_string(subject_id) + ")");
    if (ibi_std < 0) throw ParameterError("SubjectProfile: ibi_std must be >= 0");
    if (duration <= 0) throw ParameterError("SubjectProfile: duration must be positive");
    if (noise_std < 0) throw ParameterError("SubjectProfile: noise_std must be >= 0");
  }
};

/// A sampled waveform with its ground-truth beat locations.
struct AnnotatedSignal {
  std::vector<float> samples;
  double fs = 500.0;                  // samples per second
  std::vector<std::int64_t> r_peaks;  // strictly increasing sample indices
  int subject_id = 0;

  void validate() const {
    if (fs <= 0) throw DataError("AnnotatedSignal: fs must be positive");
    for (std::size_t i = 0; i < r_peaks.size(); ++i) {
      if (r_peaks[i] < 0 || r_peaks[i] >= static_cast<std::int64_t>(samples.size()))
        throw DataError("AnnotatedSignal: r_peak " + std::to_string(r_peaks[i]) +
                        " outside signal of " + std::to_string(samples.size()) + " samples");
      if (i > 0 && r_peaks[i] <= r_peaks[i - 1])
        throw DataError("AnnotatedSignal: r_peaks not strictly increasing at index " +
                        std::to_string(i));
      if (i > 0 && static_cast<double>(r_peaks[i] - r_peaks[i - 1]) / fs <= 0.2)
        throw DataError("AnnotatedSignal: IBI below the 0.2 s physiological floor at beat " +
                        std::to_string(i));
    }
  }
};

/// IBIs in seconds from consecutive peak indices: n peaks give n-1 intervals.
std::vector<double> ibis_from_peaks(const std::vector<std::int64_t>& r_peaks, double fs);

/// Median of the IBI sequence; throws on fewer than 2 peaks.
double median_ibi(const AnnotatedSignal& signal);

}  // namespace ibinet
