#include "ae/types.hpp"

namespace ae {

void validate(const Waveform& w) {
  if (w.samples.size() == 0) throw EmptyInput("waveform has no samples");
  if (!(w.sample_rate_hz > 0)) throw DataError("waveform sample rate must be positive");
  if (!w.samples.isFinite().all()) {
    Index bad = 0;
    for (Index i = 0; i < w.samples.size(); ++i) {
      if (!std::isfinite(w.samples[i])) {
        bad = i;
        break;
      }
    }
    throw DataError("waveform contains a non-finite sample at index " + std::to_string(bad));
  }
}

void validate(const Segment& s) {
  if (s.samples.size() == 0) throw EmptyInput("segment has no samples");
  if (!(s.sample_rate_hz > 0)) throw DataError("segment sample rate must be positive");
  if (s.start_index < 0) throw DataError("segment start_index must be nonnegative");
  if (!s.samples.isFinite().all()) throw DataError("segment contains a non-finite sample");
}

void validate(const AuxChannel& ch) {
  if (ch.times_s.size() == 0) throw EmptyInput("aux channel is empty");
  if (ch.times_s.size() != ch.values.size())
    throw DataError("aux channel time/value lengths differ");
  for (Index i = 1; i < ch.times_s.size(); ++i) {
    if (!(ch.times_s[i] > ch.times_s[i - 1]))
      throw DataError("aux channel times must be strictly increasing (index " +
                      std::to_string(i) + ")");
  }
}

Segment take_segment(const Waveform& w, Index onset, Index duration) {
  if (onset < 0 || duration <= 0 || onset + duration > w.samples.size())
    throw DataError("segment span [" + std::to_string(onset) + ", " +
                    std::to_string(onset + duration) + ") outside waveform");
  Segment s;
  s.samples = w.samples.segment(onset, duration);
  s.sample_rate_hz = w.sample_rate_hz;
  s.start_index = onset;
  return s;
}

}  // namespace ae
