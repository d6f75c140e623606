#include "ibinet/signalgen.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace ibinet {

std::vector<double> ibis_from_peaks(const std::vector<std::int64_t>& r_peaks, double fs) {
  std::vector<double> ibis;
  if (r_peaks.size() < 2) return ibis;
  ibis.reserve(r_peaks.size() - 1);
  for (std::size_t i = 1; i < r_peaks.size(); ++i)
    ibis.push_back(static_cast<double>(r_peaks[i] - r_peaks[i - 1]) / fs);
  return ibis;
}

double median_ibi(const AnnotatedSignal& signal) {
  auto ibis = ibis_from_peaks(signal.r_peaks, signal.fs);
  if (ibis.empty())
    throw ParameterError("median_ibi: signal has fewer than 2 R-peaks");
  std::sort(ibis.begin(), ibis.end());
  const std::size_t n = ibis.size();
  return n % 2 ? ibis[n / 2] : 0.5 * (ibis[n / 2 - 1] + ibis[n / 2]);
}

std::vector<double> generate_ibi_sequence(const SubjectProfile& profile, std::uint64_t seed) {
  profile.validate();
  Rng rng(seed);
  std::vector<double> ibis;
  double total = 0;
  // The 1e-9 slack stops an extra beat from being appended when the running
  // sum is short of the duration only by accumulated rounding.
  while (total + 1e-9 < profile.duration) {
    double ibi = profile.ibi_mean;
    if (profile.ibi_std > 0)
      ibi = std::clamp(rng.normal(profile.ibi_mean, profile.ibi_std), profile.ibi_min,
                       profile.ibi_max);
    ibis.push_back(ibi);
    total += ibi;
  }
  return ibis;
}

namespace {

struct Template {
  std::vector<double> values;  // peak value exactly 1.0 at `center`
  std::int64_t center = 0;
};

/// Samples the requested pulse shape, then shifts and scales it so that its
/// discrete maximum is exactly 1.0 and sits at `center`.
Template make_template(PulseTemplate kind, double fs) {
  std::vector<double> raw;
  auto sample_range = [&](double t0, double t1, auto f) {
    const auto n = static_cast<std::int64_t>(std::ceil((t1 - t0) * fs)) + 1;
    raw.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = f(t0 + i / fs);
  };
  switch (kind) {
    case PulseTemplate::kGaussianDerivative: {
      const double sigma = 0.015;  // 60 ms support
      sample_range(-4 * sigma, 4 * sigma,
                   [&](double t) { return -t * std::exp(-t * t / (2 * sigma * sigma)); });
      break;
    }
    case PulseTemplate::kDampedSinusoid: {
      const double tau = 0.015, freq = 25.0;
      sample_range(0.0, 0.06,
                   [&](double t) { return std::exp(-t / tau) * std::sin(2 * M_PI * freq * t); });
      break;
    }
    case PulseTemplate::kBiphasic: {
      const double sigma = 0.008, delta = 0.010;
      sample_range(-0.04, 0.04, [&](double t) {
        return std::exp(-(t + delta) * (t + delta) / (2 * sigma * sigma)) -
               std::exp(-(t - delta) * (t - delta) / (2 * sigma * sigma));
      });
      break;
    }
  }
  const auto it = std::max_element(raw.begin(), raw.end());
  const double peak = *it;
  for (double& v : raw) v /= peak;
  Template t;
  t.values = std::move(raw);
  t.center = static_cast<std::int64_t>(it - t.values.begin());
  return t;
}

}  // namespace

AnnotatedSignal render_pulse_train(const std::vector<double>& ibis,
                                   const SubjectProfile& profile, double fs,
                                   std::uint64_t seed) {
  if (fs < 100) throw ParameterError("render_pulse_train: fs must be >= 100 Hz");
  double min_ibi = std::numeric_limits<double>::infinity();
  for (double ibi : ibis) {
    if (ibi <= 0) throw ParameterError("render_pulse_train: IBIs must be positive");
    min_ibi = std::min(min_ibi, ibi);
  }

  const Template tmpl = make_template(profile.pulse_template, fs);
  if (!ibis.empty() &&
      static_cast<double>(tmpl.values.size()) / fs > min_ibi)
    std::cerr << "[ibinet] warning: pulse template ("
              << static_cast<double>(tmpl.values.size()) / fs
              << " s) wider than the smallest IBI (" << min_ibi
              << " s); pulses will superpose\n";

  AnnotatedSignal out;
  out.fs = fs;
  out.subject_id = profile.subject_id;
  out.r_peaks.reserve(ibis.size() + 1);
  double t = 0;
  for (std::size_t k = 0; k <= ibis.size(); ++k) {
    out.r_peaks.push_back(std::llround(fs * t));
    if (k < ibis.size()) t += ibis[k];
  }

  const std::int64_t tail = static_cast<std::int64_t>(tmpl.values.size()) - tmpl.center;
  const std::int64_t len = out.r_peaks.back() + tail;
  out.samples.assign(static_cast<std::size_t>(len), 0.0f);
  for (std::int64_t peak : out.r_peaks) {
    const std::int64_t start = peak - tmpl.center;
    for (std::size_t k = 0; k < tmpl.values.size(); ++k) {
      const std::int64_t p = start + static_cast<std::int64_t>(k);
      if (p >= 0 && p < len)
        out.samples[static_cast<std::size_t>(p)] += static_cast<float>(tmpl.values[k]);
    }
  }

  if (profile.noise_std > 0) {
    Rng rng(Rng::mix(seed, 0x6e6f6973u));  // noise stream
    for (float& s : out.samples)
      s += static_cast<float>(rng.normal(0.0, profile.noise_std));
  }
  out.validate();
  return out;
}

AnnotatedSignal synthesize_subject(const SubjectProfile& profile, double fs,
                                   std::uint64_t seed) {
  const auto ibis = generate_ibi_sequence(profile, Rng::mix(seed, 0x69626973u));
  return render_pulse_train(ibis, profile, fs, seed);
}

AnnotatedSignal superpose_augment(const AnnotatedSignal& signal, std::uint64_t seed) {
  if (signal.r_peaks.size() < 2)
    throw ParameterError("superpose_augment: signal has fewer than 2 R-peaks");
  const double med = median_ibi(signal);
  if (med < 0.9 || med > 1.1)
    throw AugmentationNotApplicable("superpose_augment: median IBI " + std::to_string(med) +
                                    " s outside the eligible range [0.9, 1.1] s");

  Rng rng(seed);
  const double alpha = rng.uniform(0.450, 0.550);
  const auto shift = std::llround(alpha * signal.fs);
  const auto n = static_cast<std::int64_t>(signal.samples.size());
  const std::int64_t out_len = n - shift;
  if (out_len <= 0)
    throw AugmentationNotApplicable("superpose_augment: signal shorter than the shift");

  AnnotatedSignal out;
  out.fs = signal.fs;
  out.subject_id = signal.subject_id;
  out.samples.resize(static_cast<std::size_t>(out_len));
  for (std::int64_t i = 0; i < out_len; ++i)
    out.samples[static_cast<std::size_t>(i)] =
        signal.samples[static_cast<std::size_t>(i)] +
        signal.samples[static_cast<std::size_t>(i + shift)];

  // Union of the original peaks and the left-shifted copies, restricted to
  // the trimmed support; coincident indices merge into one peak.
  for (std::int64_t p : signal.r_peaks) {
    if (p < out_len) out.r_peaks.push_back(p);
    if (p - shift >= 0 && p - shift < out_len) out.r_peaks.push_back(p - shift);
  }
  std::sort(out.r_peaks.begin(), out.r_peaks.end());
  out.r_peaks.erase(std::unique(out.r_peaks.begin(), out.r_peaks.end()), out.r_peaks.end());
  out.validate();
  return out;
}

AnnotatedSignal resample(const AnnotatedSignal& signal, double target_fs) {
  if (target_fs < 100) throw ParameterError("resample: target_fs must be >= 100 Hz");
  const auto n = static_cast<std::int64_t>(signal.samples.size());
  if (n == 0) throw DataError("resample: empty signal");

  AnnotatedSignal out;
  out.fs = target_fs;
  out.subject_id = signal.subject_id;
  const double ratio = signal.fs / target_fs;
  const auto out_n =
      static_cast<std::int64_t>(std::floor(static_cast<double>(n - 1) / ratio)) + 1;
  out.samples.resize(static_cast<std::size_t>(out_n));
  for (std::int64_t k = 0; k < out_n; ++k) {
    const double pos = static_cast<double>(k) * ratio;
    const auto i0 = static_cast<std::int64_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i0);
    const double a = signal.samples[static_cast<std::size_t>(i0)];
    const double b = signal.samples[static_cast<std::size_t>(std::min(i0 + 1, n - 1))];
    out.samples[static_cast<std::size_t>(k)] = static_cast<float>(a + frac * (b - a));
  }
  for (std::int64_t p : signal.r_peaks) {
    const auto q = std::llround(static_cast<double>(p) * target_fs / signal.fs);
    if (q >= 0 && q < out_n &&
        (out.r_peaks.empty() || q > out.r_peaks.back()))
      out.r_peaks.push_back(q);
  }
  out.validate();
  return out;
}

std::vector<SubjectProfile> default_profiles(double duration_seconds) {
  // Medians mirror the population spread of the source data: subjects 3 and
  // 10 low, subjects 7-9 high enough to be eligible for superposition
  // augmentation, the rest mid-range.
  const double means[11] = {0.70, 0.68, 0.56, 0.72, 0.66, 0.74, 0.92, 0.95, 0.98, 0.58, 0.71};
  std::vector<SubjectProfile> profiles;
  profiles.reserve(11);
  for (int i = 0; i < 11; ++i) {
    SubjectProfile p;
    p.subject_id = i + 1;
    p.ibi_mean = means[i];
    p.ibi_std = 0.04;
    p.ibi_min = 0.40;
    p.ibi_max = 1.30;
    p.noise_std = 0.03;
    p.duration = duration_seconds;
    profiles.push_back(p);
  }
  return profiles;
}

}  // namespace ibinet
