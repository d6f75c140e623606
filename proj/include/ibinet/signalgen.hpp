#pragma once

#include <cstdint>
#include <vector>

#include "ibinet/rng.hpp"
#include "ibinet/signal.hpp"

namespace ibinet {

/// Draws i.i.d. IBIs from a normal (ibi_mean, ibi_std) clamped to
/// [ibi_min, ibi_max] until the sequence covers profile.duration.
/// Pure function of (profile, seed).
std::vector<double> generate_ibi_sequence(const SubjectProfile& profile, std::uint64_t seed);

/// Renders a pulse train: R-peak k lands at sample round(fs * sum of the
/// first k IBIs), a unit-peak template is superposed at every beat, and white
/// Gaussian noise of std = noise_std * peak amplitude is added. n IBIs give
/// n+1 peaks.
AnnotatedSignal render_pulse_train(const std::vector<double>& ibis,
                                   const SubjectProfile& profile, double fs,
                                   std::uint64_t seed);

/// Convenience: generate_ibi_sequence + render_pulse_train at 500 Hz.
AnnotatedSignal synthesize_subject(const SubjectProfile& profile, double fs,
                                   std::uint64_t seed);

/// Superposition augmentation: x_aug(t) = x(t) + x(t + alpha) with
/// alpha ~ U(0.450 s, 0.550 s) rounded to whole samples. Output peaks are the
/// union of the original peaks and the left-shifted copies within the trimmed
/// support; requires the input median IBI to lie in [0.9, 1.1] s.
AnnotatedSignal superpose_augment(const AnnotatedSignal& signal, std::uint64_t seed);

/// Linear-interpolation resampling; peaks are remapped by index scaling.
AnnotatedSignal resample(const AnnotatedSignal& signal, double target_fs);

/// The default 11-subject population: two low-IBI subjects (ids 3 and 10),
/// three high-IBI subjects eligible for superposition augmentation (ids 7-9),
/// and mid-range subjects elsewhere.
std::vector<SubjectProfile> default_profiles(double duration_seconds = 300.0);

}  // namespace ibinet
