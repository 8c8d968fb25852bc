#pragma once

#include <array>
#include <string>
#include <vector>

#include "ae/types.hpp"
#include "ae/wavelet.hpp"

namespace ae {
namespace features {

using Eigen::MatrixXd;

/// The 12 classifier features, in the fixed documented order.
struct FeatureVector {
  double peak_amplitude = 0;
  double rms = 0;
  double energy = 0;
  double crest_factor = 0;
  double kurtosis = 0;       // non-excess: Gaussian -> 3
  double skewness = 0;
  double zcr = 0;            // sign changes per sample
  double rise_time_s = 0;    // envelope onset (10% of peak) to envelope peak
  double decay_time_s = 0;   // envelope peak to last 10% crossing
  double spectral_centroid_hz = 0;
  double spectral_bandwidth_hz = 0;
  double spectral_entropy = 0;

  static constexpr int kCount = 12;
  static const std::array<std::string, kCount>& names();
  std::array<double, kCount> values() const;
};

/// Morphology + time-frequency vector used for clustering.
struct ClusterFeatureVector {
  double duration_s = 0;
  double rise_frac = 0;
  double decay_frac = 0;
  double kurtosis_rmsnorm = 0;
  double zcr_per_s = 0;
  double spectral_centroid_khz = 0;
  double spectral_bandwidth_khz = 0;
  double spectral_entropy = 0;
  double energy_frac_d1 = 0;
  double energy_frac_d2 = 0;
  double energy_frac_d3 = 0;
  double energy_frac_a3 = 0;
  double wavelet_entropy = 0;

  static constexpr int kCount = 13;
  static const std::array<std::string, kCount>& names();
  std::array<double, kCount> values() const;
};

FeatureVector extract_features(const Segment& s);
ClusterFeatureVector extract_cluster_features(const Segment& s);

/// Per-column zero-mean / unit-variance transform fitted on training rows.
/// Zero-variance columns are dropped (their indices recorded).
struct Standardizer {
  ArrayXd mean;
  ArrayXd std;
  std::vector<Index> kept;     // column indices retained
  std::vector<Index> dropped;  // zero-variance columns
};

Standardizer standardizer_fit(const MatrixXd& X);
MatrixXd standardizer_apply(const Standardizer& z, const MatrixXd& X);

}  // namespace features
}  // namespace ae
