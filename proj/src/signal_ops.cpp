#include "ae/signal_ops.hpp"

#include <cmath>

namespace ae {

double rms(const ArrayXd& x) {
  return std::sqrt(x.square().sum() / static_cast<double>(x.size()));
}

Waveform normalize_peak(const Waveform& w) {
  const double peak = w.samples.abs().maxCoeff();
  if (!(peak > 0)) throw DegenerateSignal("normalize_peak: all-zero signal");
  Waveform out = w;
  out.samples /= peak;
  return out;
}

Segment rms_normalize(const Segment& s) {
  const double r = rms(s.samples);
  if (!(r > 0)) throw DegenerateSignal("rms_normalize: zero-RMS signal");
  Segment out = s;
  out.samples /= r;
  return out;
}

Segment resample_to_length(const Segment& s, Index n) {
  const Index len = s.samples.size();
  if (len < 2) throw DataError("resample_to_length: input needs at least 2 samples");
  if (n < 2) throw DataError("resample_to_length: target length must be >= 2");
  if (n == len) return s;

  Segment out;
  out.sample_rate_hz = s.sample_rate_hz * static_cast<double>(n - 1) / static_cast<double>(len - 1);
  out.start_index = s.start_index;
  out.samples.resize(n);
  const double step = static_cast<double>(len - 1) / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * step;
    Index j = static_cast<Index>(t);
    if (j >= len - 1) j = len - 2;
    const double frac = t - static_cast<double>(j);
    out.samples[i] = s.samples[j] + frac * (s.samples[j + 1] - s.samples[j]);
  }
  return out;
}

}  // namespace ae
