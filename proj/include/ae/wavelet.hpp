#pragma once

#include <vector>

#include "ae/types.hpp"

namespace ae {
namespace wavelet {

using Eigen::MatrixXcd;

/// A frequency band targeted by a stack of Morlet scales.
struct BandSpec {
  double center_hz = 0.0;
  double frac_halfwidth = 0.20;
  Index n_scales = 8;
};

/// Instantaneous band energy E[t] = sum over the band's scales of |CWT|^2.
struct CwtBandResult {
  BandSpec band;
  ArrayXd scales;  // in samples, descending (ascending frequency)
  ArrayXd energy;  // length = signal length, nonnegative
};

struct CwtOptions {
  double morlet_w0 = 6.0;
  Index chunk_len = Index{1} << 20;
  Index overlap = Index{1} << 16;
  int threads = 1;
};

/// Scales (in samples) geometrically spaced so the Morlet mapping
/// f = w0 * fs / (2*pi*scale) covers [center*(1-h), center*(1+h)]
/// endpoint-inclusive. n_scales == 1 maps exactly to the center.
ArrayXd scales_for_band(const BandSpec& band, double fs_hz, double morlet_w0);

/// Morlet CWT rows via FFT circular convolution with the L2-normalized
/// wavelet; a raised-cosine edge taper suppresses wrap-around.
MatrixXcd cwt_morlet(const ArrayXd& x, const ArrayXd& scales, double morlet_w0,
                     bool edge_taper = true);
MatrixXcd cwt_morlet(const Waveform& w, const ArrayXd& scales, double morlet_w0,
                     bool edge_taper = true);

/// E[t] = sum over rows of |coeff|^2.
ArrayXd band_energy(const MatrixXcd& coeffs);

/// Band-energy series for several bands at once. Long records are processed
/// in overlapping chunks whose forward FFT is shared by all scales; the
/// overlap region is discarded, so the chunking is invisible in the result.
std::vector<CwtBandResult> band_energies(const ArrayXd& x, double fs_hz,
                                         const std::vector<BandSpec>& bands,
                                         const CwtOptions& opts = {});

/// Multilevel DB4 decomposition (periodized, orthonormal).
/// Input length must be a multiple of 2^level and at least 2^level * 8.
struct DwtDecomposition {
  std::vector<ArrayXd> details;  // D1 (finest) .. D_level
  ArrayXd approx;                // A_level
  int level = 0;
};

struct DwtFeatures {
  double energy_frac_d1 = 0.0;
  double energy_frac_d2 = 0.0;
  double energy_frac_d3 = 0.0;
  double energy_frac_a3 = 0.0;
  double wavelet_entropy = 0.0;
};

DwtDecomposition dwt_db4(const ArrayXd& x, int level = 3);
DwtDecomposition dwt_db4(const Segment& s, int level = 3);

/// Inverse of dwt_db4 (perfect reconstruction).
ArrayXd idwt_db4(const DwtDecomposition& d);

/// Subband energy fractions and their Shannon entropy (level-3 only).
DwtFeatures wavelet_features(const DwtDecomposition& d);

void save_band_energy_csv(const std::string& path, const CwtBandResult& r, double fs_hz,
                          double t0_s, Index max_rows = 0,
                          const std::string& provenance = "");

}  // namespace wavelet
}  // namespace ae
