#pragma once

#include <vector>

#include "ae/types.hpp"

namespace ae {
namespace spectral {

/// One-sided magnitude spectrum: magnitude[k] = |DFT(x)[k]|,
/// freqs_hz[k] = k * fs / N for k = 0..N/2.
struct Spectrum {
  ArrayXd freqs_hz;
  ArrayXd magnitude;
};

Spectrum magnitude_spectrum(const Waveform& w);

/// Second-order section y[n] = b0 x + z0; z0' = b1 x - a1 y + z1; z1' = b2 x - a2 y.
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

/// Butterworth bandpass of the given analog prototype order (2*order poles),
/// as cascaded biquads, unity gain at the band's geometric center.
std::vector<Biquad> butter_bandpass(double lo_hz, double hi_hz, double fs_hz, int order);

/// Forward-backward (zero-phase) filtering with odd-reflection padding and
/// steady-state initial conditions per section. padlen <= 0 selects the
/// default 3 * (2 * n_sections + 1); it is clamped to len(x) - 1.
ArrayXd filtfilt(const std::vector<Biquad>& sos, const ArrayXd& x, Index padlen = 0);

/// Zero-phase Butterworth bandpass. Runs filtfilt in both pass orders and
/// averages, which makes time-reversal symmetry exact.
Waveform zero_phase_bandpass(const Waveform& w, double lo_hz, double hi_hz, int order = 4);

/// Magnitude of the analytic signal.
ArrayXd hilbert_envelope(const ArrayXd& x);
ArrayXd hilbert_envelope(const Segment& s);

/// Centers (Hz) of local maxima of the smoothed magnitude with prominence
/// >= min_prominence_frac * global max, sorted by descending prominence and
/// truncated to max_peaks. Smoothing is a moving average of ~100 Hz width.
std::vector<double> find_band_peaks(const Spectrum& spec, double min_prominence_frac,
                                    int max_peaks);

void save_spectrum_csv(const std::string& path, const Spectrum& spec,
                       const std::string& provenance = "");

}  // namespace spectral
}  // namespace ae
