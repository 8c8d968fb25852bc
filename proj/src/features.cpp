#include "ae/features.hpp"

#include <cmath>

#include "ae/fft.hpp"
#include "ae/signal_ops.hpp"
#include "ae/spectral.hpp"

namespace ae {
namespace features {

const std::array<std::string, FeatureVector::kCount>& FeatureVector::names() {
  static const std::array<std::string, kCount> n = {
      "peak_amplitude", "rms",        "energy",        "crest_factor",
      "kurtosis",       "skewness",   "zcr",           "rise_time_s",
      "decay_time_s",   "spectral_centroid_hz", "spectral_bandwidth_hz", "spectral_entropy"};
  return n;
}

std::array<double, FeatureVector::kCount> FeatureVector::values() const {
  return {peak_amplitude, rms,        energy,        crest_factor,
          kurtosis,       skewness,   zcr,           rise_time_s,
          decay_time_s,   spectral_centroid_hz, spectral_bandwidth_hz, spectral_entropy};
}

const std::array<std::string, ClusterFeatureVector::kCount>& ClusterFeatureVector::names() {
  static const std::array<std::string, kCount> n = {
      "duration_s",     "rise_frac",       "decay_frac",
      "kurtosis_rmsnorm", "zcr_per_s",     "spectral_centroid_khz",
      "spectral_bandwidth_khz", "spectral_entropy", "energy_frac_d1",
      "energy_frac_d2", "energy_frac_d3",  "energy_frac_a3",
      "wavelet_entropy"};
  return n;
}

std::array<double, ClusterFeatureVector::kCount> ClusterFeatureVector::values() const {
  return {duration_s,     rise_frac,       decay_frac,
          kurtosis_rmsnorm, zcr_per_s,     spectral_centroid_khz,
          spectral_bandwidth_khz, spectral_entropy, energy_frac_d1,
          energy_frac_d2, energy_frac_d3,  energy_frac_a3,
          wavelet_entropy};
}

namespace {

constexpr double kEnvelopeThresholdFrac = 0.10;

struct EnvelopeTimes {
  double rise_s;
  double decay_s;
};

EnvelopeTimes envelope_times(const ArrayXd& x, double fs) {
  const ArrayXd env = spectral::hilbert_envelope(x);
  Index peak = 0;
  env.maxCoeff(&peak);
  const double level = kEnvelopeThresholdFrac * env[peak];
  Index onset = 0;
  for (Index i = 0; i <= peak; ++i) {
    if (env[i] >= level) {
      onset = i;
      break;
    }
  }
  Index last = peak;
  for (Index i = env.size() - 1; i >= peak; --i) {
    if (env[i] >= level) {
      last = i;
      break;
    }
  }
  return {static_cast<double>(peak - onset) / fs, static_cast<double>(last - peak) / fs};
}

Index count_sign_changes(const ArrayXd& x) {
  Index changes = 0;
  for (Index i = 1; i < x.size(); ++i) {
    const bool a = x[i - 1] >= 0, b = x[i] >= 0;
    if (a != b) ++changes;
  }
  return changes;
}

struct SpectralMoments {
  double centroid_hz;
  double bandwidth_hz;
  double entropy;
};

// Moments of the one-sided |FFT| of the RMS-normalized segment.
SpectralMoments spectral_moments(const ArrayXd& x, double fs) {
  Fft fft;
  const VectorXcd X = fft.forward(x);
  const Index n = x.size();
  const Index half = n / 2;
  double total = 0, weighted = 0;
  ArrayXd mag(half + 1), freq(half + 1);
  for (Index k = 0; k <= half; ++k) {
    mag[k] = std::abs(X[k]);
    freq[k] = static_cast<double>(k) * fs / static_cast<double>(n);
    total += mag[k];
    weighted += freq[k] * mag[k];
  }
  SpectralMoments m{0, 0, 0};
  if (!(total > 0)) return m;
  m.centroid_hz = weighted / total;
  double var = 0, entropy = 0;
  for (Index k = 0; k <= half; ++k) {
    const double p = mag[k] / total;
    var += (freq[k] - m.centroid_hz) * (freq[k] - m.centroid_hz) * p;
    if (p > 0) entropy -= p * std::log(p);
  }
  m.bandwidth_hz = std::sqrt(var);
  m.entropy = entropy;
  return m;
}

void check_segment(const Segment& s) {
  if (s.samples.size() < 32) throw DataError("feature extraction needs >= 32 samples");
  if (!(rms(s.samples) > 0)) throw DegenerateSignal("feature extraction: zero-RMS segment");
}

double central_moment_ratio(const ArrayXd& x, int order) {
  const double mean = x.mean();
  const ArrayXd d = x - mean;
  const double m2 = d.square().mean();
  if (!(m2 > 0)) return 0;
  if (order == 3) return d.cube().mean() / std::pow(m2, 1.5);
  return d.square().square().mean() / (m2 * m2);
}

}  // namespace

FeatureVector extract_features(const Segment& s) {
  check_segment(s);
  const ArrayXd& x = s.samples;
  const double fs = s.sample_rate_hz;
  const auto n = static_cast<double>(x.size());

  FeatureVector f;
  f.peak_amplitude = x.abs().maxCoeff();
  f.energy = x.square().sum();
  f.rms = std::sqrt(f.energy / n);
  f.crest_factor = f.peak_amplitude / f.rms;
  f.kurtosis = central_moment_ratio(x, 4);
  f.skewness = central_moment_ratio(x, 3);
  f.zcr = static_cast<double>(count_sign_changes(x)) / n;

  const EnvelopeTimes et = envelope_times(x, fs);
  f.rise_time_s = et.rise_s;
  f.decay_time_s = et.decay_s;

  const ArrayXd normed = x / f.rms;
  const SpectralMoments m = spectral_moments(normed, fs);
  f.spectral_centroid_hz = m.centroid_hz;
  f.spectral_bandwidth_hz = m.bandwidth_hz;
  f.spectral_entropy = m.entropy;
  return f;
}

ClusterFeatureVector extract_cluster_features(const Segment& s) {
  check_segment(s);
  const ArrayXd& x = s.samples;
  const double fs = s.sample_rate_hz;
  const double duration = static_cast<double>(x.size()) / fs;

  ClusterFeatureVector f;
  f.duration_s = duration;

  const EnvelopeTimes et = envelope_times(x, fs);
  f.rise_frac = et.rise_s / duration;
  f.decay_frac = et.decay_s / duration;

  const ArrayXd normed = x / rms(x);
  f.kurtosis_rmsnorm = central_moment_ratio(normed, 4);
  f.zcr_per_s = static_cast<double>(count_sign_changes(x)) / duration;

  const SpectralMoments m = spectral_moments(normed, fs);
  f.spectral_centroid_khz = m.centroid_hz / 1000.0;
  f.spectral_bandwidth_khz = m.bandwidth_hz / 1000.0;
  f.spectral_entropy = m.entropy;

  // DWT wants a length divisible by 2^3; trim at most 7 trailing samples.
  const Index usable = (x.size() / 8) * 8;
  const auto dec = wavelet::dwt_db4(ArrayXd(x.head(usable)), 3);
  const wavelet::DwtFeatures wf = wavelet::wavelet_features(dec);
  f.energy_frac_d1 = wf.energy_frac_d1;
  f.energy_frac_d2 = wf.energy_frac_d2;
  f.energy_frac_d3 = wf.energy_frac_d3;
  f.energy_frac_a3 = wf.energy_frac_a3;
  f.wavelet_entropy = wf.wavelet_entropy;
  return f;
}

Standardizer standardizer_fit(const MatrixXd& X) {
  if (X.rows() < 2) throw DataError("standardizer_fit: need at least 2 rows");
  Standardizer z;
  z.mean = X.colwise().mean().array();
  z.std.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const auto col = X.col(j).array();
    z.std[j] = std::sqrt((col - z.mean[j]).square().mean());
    if (z.std[j] > 0) {
      z.kept.push_back(j);
    } else {
      z.dropped.push_back(j);
    }
  }
  return z;
}

MatrixXd standardizer_apply(const Standardizer& z, const MatrixXd& X) {
  if (X.cols() != z.mean.size()) throw DataError("standardizer_apply: column count mismatch");
  MatrixXd out(X.rows(), static_cast<Index>(z.kept.size()));
  for (size_t k = 0; k < z.kept.size(); ++k) {
    const Index j = z.kept[k];
    out.col(static_cast<Index>(k)) = (X.col(j).array() - z.mean[j]) / z.std[j];
  }
  return out;
}

}  // namespace features
}  // namespace ae
