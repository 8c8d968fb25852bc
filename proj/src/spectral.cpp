#include "ae/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>

#include "ae/fft.hpp"
#include "ae/io.hpp"

namespace ae {
namespace spectral {

using cplx = std::complex<double>;

Spectrum magnitude_spectrum(const Waveform& w) {
  const Index n = w.samples.size();
  if (n < 2) throw DataError("magnitude_spectrum: need at least 2 samples");
  Fft fft;
  const VectorXcd X = fft.forward(w.samples);
  const Index half = n / 2;
  Spectrum spec;
  spec.freqs_hz.resize(half + 1);
  spec.magnitude.resize(half + 1);
  for (Index k = 0; k <= half; ++k) {
    spec.freqs_hz[k] = static_cast<double>(k) * w.sample_rate_hz / static_cast<double>(n);
    spec.magnitude[k] = std::abs(X[k]);
  }
  return spec;
}

std::vector<Biquad> butter_bandpass(double lo_hz, double hi_hz, double fs_hz, int order) {
  if (!(lo_hz > 0 && lo_hz < hi_hz && hi_hz < fs_hz / 2))
    throw DataError("butter_bandpass: need 0 < lo < hi < fs/2");
  if (order < 1) throw DataError("butter_bandpass: order must be >= 1");

  const double fs2 = 2.0 * fs_hz;
  const double w1 = fs2 * std::tan(M_PI * lo_hz / fs_hz);
  const double w2 = fs2 * std::tan(M_PI * hi_hz / fs_hz);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  const auto bilinear = [&](cplx s) { return (fs2 + s) / (fs2 - s); };

  // Lowpass-to-bandpass maps each prototype pole p to the pair
  // s = p*bw/2 +- sqrt((p*bw/2)^2 - w0^2).
  std::vector<Biquad> sos;
  const auto add_section_conj = [&](cplx zp) {
    sos.push_back({1.0, 0.0, -1.0, -2.0 * zp.real(), std::norm(zp)});
  };
  const auto add_section_real = [&](double r1, double r2) {
    sos.push_back({1.0, 0.0, -1.0, -(r1 + r2), r1 * r2});
  };

  const int n = order;
  for (int k = 0; k < n; ++k) {
    const double theta = M_PI * (2.0 * k + n + 1.0) / (2.0 * n);
    const cplx proto(std::cos(theta), std::sin(theta));
    if (std::abs(proto.imag()) < 1e-12) {
      // Real prototype pole (odd order).
      const cplx a = proto * (bw / 2.0);
      const cplx root = std::sqrt(a * a - cplx(w0 * w0, 0.0));
      const cplx s1 = a + root, s2 = a - root;
      const cplx z1 = bilinear(s1), z2 = bilinear(s2);
      if (std::abs(z1.imag()) > 1e-12) {
        add_section_conj(z1);
      } else {
        add_section_real(z1.real(), z2.real());
      }
      continue;
    }
    if (proto.imag() < 0) continue;  // conjugate handled via its partner
    const cplx a = proto * (bw / 2.0);
    const cplx root = std::sqrt(a * a - cplx(w0 * w0, 0.0));
    add_section_conj(bilinear(a + root));
    add_section_conj(bilinear(a - root));
  }

  // Normalize to unit gain at the (warped) band center.
  const double fc_dig = std::atan(w0 / fs2) * fs_hz / M_PI;
  const double theta = 2.0 * M_PI * fc_dig / fs_hz;
  const cplx e1 = std::polar(1.0, -theta), e2 = std::polar(1.0, -2.0 * theta);
  cplx h(1.0, 0.0);
  for (const Biquad& q : sos)
    h *= (q.b0 + q.b1 * e1 + q.b2 * e2) / (1.0 + q.a1 * e1 + q.a2 * e2);
  const double g = 1.0 / std::abs(h);
  sos.front().b0 *= g;
  sos.front().b1 *= g;
  sos.front().b2 *= g;
  return sos;
}

namespace {

// One causal pass, direct form II transposed, with the per-section state
// seeded to steady state for the section's first input value.
void sosfilt_inplace(const std::vector<Biquad>& sos, ArrayXd& x) {
  for (const Biquad& q : sos) {
    const double h1 = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double x0 = x[0];
    double z1 = (q.b2 - q.a2 * h1) * x0;
    double z0 = (q.b1 - q.a1 * h1) * x0 + z1;
    for (Index i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      const double yi = q.b0 * xi + z0;
      z0 = q.b1 * xi - q.a1 * yi + z1;
      z1 = q.b2 * xi - q.a2 * yi;
      x[i] = yi;
    }
  }
}

}  // namespace

ArrayXd filtfilt(const std::vector<Biquad>& sos, const ArrayXd& x, Index padlen) {
  const Index n = x.size();
  if (n == 0) throw EmptyInput("filtfilt: empty input");
  if (padlen <= 0) padlen = 3 * (2 * static_cast<Index>(sos.size()) + 1);
  padlen = std::min(padlen, n - 1);

  ArrayXd ext(n + 2 * padlen);
  for (Index i = 0; i < padlen; ++i) ext[i] = 2.0 * x[0] - x[padlen - i];
  ext.segment(padlen, n) = x;
  for (Index i = 0; i < padlen; ++i) ext[padlen + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  sosfilt_inplace(sos, ext);
  ext.reverseInPlace();
  sosfilt_inplace(sos, ext);
  ext.reverseInPlace();
  return ext.segment(padlen, n);
}

Waveform zero_phase_bandpass(const Waveform& w, double lo_hz, double hi_hz, int order) {
  const auto sos = butter_bandpass(lo_hz, hi_hz, w.sample_rate_hz, order);
  const ArrayXd fwd = filtfilt(sos, w.samples);
  const ArrayXd rev_in = w.samples.reverse();
  const ArrayXd bwd = filtfilt(sos, rev_in).reverse();
  Waveform out = w;
  // Averaging the two pass orders makes reversal symmetry exact.
  out.samples = 0.5 * (fwd + bwd);
  return out;
}

ArrayXd hilbert_envelope(const ArrayXd& x) {
  const Index n = x.size();
  if (n < 8) throw DataError("hilbert_envelope: need at least 8 samples");
  Fft fft;
  VectorXcd X = fft.forward(x);
  const Index half = n / 2;
  for (Index k = 1; k < half; ++k) X[k] *= 2.0;
  if (n % 2 != 0) X[half] *= 2.0;
  for (Index k = half + 1; k < n; ++k) X[k] = cplx(0.0, 0.0);
  const VectorXcd analytic = fft.inverse(X);
  return analytic.array().abs();
}

ArrayXd hilbert_envelope(const Segment& s) { return hilbert_envelope(s.samples); }

std::vector<double> find_band_peaks(const Spectrum& spec, double min_prominence_frac,
                                    int max_peaks) {
  const Index n = spec.magnitude.size();
  if (n == 0) throw EmptyInput("find_band_peaks: empty spectrum");
  if (n < 3 || max_peaks <= 0) return {};

  const double df = spec.freqs_hz[1] - spec.freqs_hz[0];
  const Index half_win = std::max<Index>(1, static_cast<Index>(std::lround(50.0 / df)));
  ArrayXd smooth(n);
  for (Index i = 0; i < n; ++i) {
    const Index r = std::min({half_win, i, n - 1 - i});
    smooth[i] = spec.magnitude.segment(i - r, 2 * r + 1).mean();
  }

  const double global_max = smooth.maxCoeff();
  if (!(global_max > 0)) return {};

  struct Peak {
    Index idx;
    double prominence;
  };
  std::vector<Peak> peaks;
  for (Index i = 1; i + 1 < n; ++i) {
    if (!(smooth[i] > smooth[i - 1] && smooth[i] > smooth[i + 1])) continue;
    const double h = smooth[i];
    double left_base = h, right_base = h;
    for (Index j = i - 1; j >= 0; --j) {
      if (smooth[j] > h) break;
      left_base = std::min(left_base, smooth[j]);
      if (j == 0) break;
    }
    for (Index j = i + 1; j < n; ++j) {
      if (smooth[j] > h) break;
      right_base = std::min(right_base, smooth[j]);
    }
    const double prom = h - std::max(left_base, right_base);
    if (prom >= min_prominence_frac * global_max) peaks.push_back({i, prom});
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    return a.prominence > b.prominence;
  });
  if (static_cast<int>(peaks.size()) > max_peaks) peaks.resize(static_cast<size_t>(max_peaks));

  std::vector<double> centers;
  centers.reserve(peaks.size());
  for (const Peak& p : peaks) centers.push_back(spec.freqs_hz[p.idx]);
  return centers;
}

void save_spectrum_csv(const std::string& path, const Spectrum& spec,
                       const std::string& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "freq_hz,magnitude\n";
  for (Index i = 0; i < spec.freqs_hz.size(); ++i)
    out << format_double(spec.freqs_hz[i]) << "," << format_double(spec.magnitude[i]) << "\n";
}

}  // namespace spectral
}  // namespace ae
