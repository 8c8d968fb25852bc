#pragma once

#include "ae/types.hpp"

namespace ae {

/// Scales so that max |sample| == 1. Throws DegenerateSignal on all-zero input.
Waveform normalize_peak(const Waveform& w);

/// Scales so that RMS == 1. Throws DegenerateSignal on zero-RMS input.
Segment rms_normalize(const Segment& s);

double rms(const ArrayXd& x);

/// Linear-interpolation resampling to exactly n samples; endpoints map to
/// endpoints. n == len(s) returns the segment unchanged.
Segment resample_to_length(const Segment& s, Index n);

}  // namespace ae
