#include "ae/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include "ae/fft.hpp"
#include "ae/io.hpp"
#include "ae/parallel.hpp"

namespace ae {
namespace wavelet {

namespace {

constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^(-1/4)

// DB4 analysis lowpass (8 taps, orthonormal).
constexpr double kDb4Lo[8] = {-0.010597401784997278, 0.032883011666982945,
                              0.030841381835986965,  -0.18703481171888114,
                              -0.02798376941698385,  0.6308807679295904,
                              0.7148465705525415,    0.23037781330885523};

// Frequency-domain Morlet at scale s (samples): psi(s*w) for w > 0, zero
// elsewhere. L2 normalization carries the sqrt(2*pi*s) factor.
void morlet_multiplier(Index n, double scale, double w0, VectorXcd& out) {
  out.setZero(n);
  const double amp = kPiQuarterInv * std::sqrt(2.0 * M_PI * scale);
  const double dw = 2.0 * M_PI / static_cast<double>(n);
  // exp(-u^2/2) underflows past |u| ~ 38; skip bins outside that window.
  const double w_lo = std::max(dw, (w0 - 38.0) / scale);
  const double w_hi = std::min(M_PI, (w0 + 38.0) / scale);
  if (w_lo > w_hi) return;
  const Index k_lo = std::max<Index>(1, static_cast<Index>(std::ceil(w_lo / dw)));
  const Index k_hi = std::min<Index>(n / 2, static_cast<Index>(std::floor(w_hi / dw)));
  for (Index k = k_lo; k <= k_hi; ++k) {
    const double u = scale * (dw * static_cast<double>(k)) - w0;
    out[k] = amp * std::exp(-0.5 * u * u);
  }
}

void check_scales(const ArrayXd& scales) {
  if (scales.size() == 0) throw DataError("cwt: empty scale list");
  if ((scales <= 0).any()) throw DataError("cwt: scales must be positive");
}

}  // namespace

ArrayXd scales_for_band(const BandSpec& band, double fs_hz, double morlet_w0) {
  if (band.n_scales < 1) throw DataError("scales_for_band: n_scales must be >= 1");
  const double f_lo = band.center_hz * (1.0 - band.frac_halfwidth);
  const double f_hi = band.center_hz * (1.0 + band.frac_halfwidth);
  if (!(f_lo > 0 && f_hi < fs_hz / 2))
    throw DataError("scales_for_band: band outside (0, fs/2)");
  const auto scale_of = [&](double f) { return morlet_w0 * fs_hz / (2.0 * M_PI * f); };

  ArrayXd scales(band.n_scales);
  if (band.n_scales == 1) {
    scales[0] = scale_of(band.center_hz);
    return scales;
  }
  const double s_max = scale_of(f_lo), s_min = scale_of(f_hi);
  const double ratio = std::pow(s_min / s_max, 1.0 / static_cast<double>(band.n_scales - 1));
  double s = s_max;
  for (Index i = 0; i < band.n_scales; ++i, s *= ratio) scales[i] = s;
  scales[band.n_scales - 1] = s_min;  // exact endpoint
  return scales;
}

MatrixXcd cwt_morlet(const ArrayXd& x, const ArrayXd& scales, double morlet_w0,
                     bool edge_taper) {
  const Index n = x.size();
  if (n < 16) throw DataError("cwt_morlet: need at least 16 samples");
  check_scales(scales);

  ArrayXd sig = x;
  if (edge_taper) {
    const Index width =
        std::min<Index>(n / 8, static_cast<Index>(std::ceil(4.0 * scales.maxCoeff())));
    for (Index i = 0; i < width; ++i) {
      const double w = 0.5 - 0.5 * std::cos(M_PI * (i + 1) / static_cast<double>(width + 1));
      sig[i] *= w;
      sig[n - 1 - i] *= w;
    }
  }

  Fft fft;
  const VectorXcd X = fft.forward(sig);
  MatrixXcd coeffs(scales.size(), n);
  VectorXcd psi, prod(n);
  for (Index r = 0; r < scales.size(); ++r) {
    morlet_multiplier(n, scales[r], morlet_w0, psi);
    prod = X.cwiseProduct(psi.conjugate());
    coeffs.row(r) = fft.inverse(prod).transpose();
  }
  return coeffs;
}

MatrixXcd cwt_morlet(const Waveform& w, const ArrayXd& scales, double morlet_w0,
                     bool edge_taper) {
  return cwt_morlet(w.samples, scales, morlet_w0, edge_taper);
}

ArrayXd band_energy(const MatrixXcd& coeffs) {
  if (coeffs.size() == 0) throw EmptyInput("band_energy: empty coefficient matrix");
  return coeffs.colwise().squaredNorm().transpose().array();
}

std::vector<CwtBandResult> band_energies(const ArrayXd& x, double fs_hz,
                                         const std::vector<BandSpec>& bands,
                                         const CwtOptions& opts) {
  const Index n = x.size();
  if (n < 16) throw DataError("band_energies: need at least 16 samples");
  if (bands.empty()) return {};

  std::vector<CwtBandResult> results(bands.size());
  double s_max = 0;
  for (size_t b = 0; b < bands.size(); ++b) {
    results[b].band = bands[b];
    results[b].scales = scales_for_band(bands[b], fs_hz, opts.morlet_w0);
    results[b].energy = ArrayXd::Zero(n);
    s_max = std::max(s_max, results[b].scales.maxCoeff());
  }

  // Overlap only needs to cover the wavelet support; shrink it for short
  // records so small inputs stay cheap.
  const Index ov = std::min<Index>(opts.overlap,
                                   std::max<Index>(64, static_cast<Index>(std::ceil(6.0 * s_max))));
  const Index usable = std::max<Index>(1, opts.chunk_len - 2 * ov);
  const Index n_chunks = (n + usable - 1) / usable;

  parallel_ranges(n_chunks, opts.threads, [&](Index c_begin, Index c_end) {
    Fft fft;
    ArrayXd buf;
    VectorXcd psi, prod;
    for (Index c = c_begin; c < c_end; ++c) {
      const Index r0 = c * usable;
      const Index r1 = std::min<Index>(n, r0 + usable);
      const Index in0 = r0 - ov;                // may be negative (zero pad)
      const Index len = (r1 - r0) + 2 * ov;
      buf.setZero(len);
      const Index src0 = std::max<Index>(0, in0);
      const Index src1 = std::min<Index>(n, in0 + len);
      buf.segment(src0 - in0, src1 - src0) = x.segment(src0, src1 - src0);

      const VectorXcd X = fft.forward(buf);
      prod.resize(len);
      for (size_t b = 0; b < bands.size(); ++b) {
        const ArrayXd& scales = results[b].scales;
        for (Index r = 0; r < scales.size(); ++r) {
          morlet_multiplier(len, scales[r], opts.morlet_w0, psi);
          prod = X.cwiseProduct(psi.conjugate());
          const VectorXcd row = fft.inverse(prod);
          // retained output region [r0, r1) sits at local offset r0 - in0
          const Index off = r0 - in0;
          for (Index j = 0; j < r1 - r0; ++j)
            results[b].energy[r0 + j] += std::norm(row[off + j]);
        }
      }
    }
  });
  return results;
}

namespace {

void dwt_step(const ArrayXd& x, ArrayXd& approx, ArrayXd& detail) {
  const Index n = x.size();
  const Index half = n / 2;
  approx.resize(half);
  detail.resize(half);
  for (Index i = 0; i < half; ++i) {
    double a = 0, d = 0;
    for (int m = 0; m < 8; ++m) {
      const Index u = (2 * i + m) % n;
      const double hm = kDb4Lo[m];
      const double gm = (m % 2 == 0 ? 1.0 : -1.0) * kDb4Lo[7 - m];
      a += hm * x[u];
      d += gm * x[u];
    }
    approx[i] = a;
    detail[i] = d;
  }
}

void idwt_step(const ArrayXd& approx, const ArrayXd& detail, ArrayXd& out) {
  const Index half = approx.size();
  const Index n = 2 * half;
  out.setZero(n);
  for (Index i = 0; i < half; ++i) {
    for (int m = 0; m < 8; ++m) {
      const Index u = (2 * i + m) % n;
      const double hm = kDb4Lo[m];
      const double gm = (m % 2 == 0 ? 1.0 : -1.0) * kDb4Lo[7 - m];
      out[u] += hm * approx[i] + gm * detail[i];
    }
  }
}

}  // namespace

DwtDecomposition dwt_db4(const ArrayXd& x, int level) {
  if (level < 1) throw DataError("dwt_db4: level must be >= 1");
  const Index n = x.size();
  const Index block = Index{1} << level;
  if (n < block * 8)
    throw DataError("dwt_db4: input too short for level " + std::to_string(level));
  if (n % block != 0)
    throw DataError("dwt_db4: input length must be a multiple of 2^level");

  DwtDecomposition dec;
  dec.level = level;
  ArrayXd cur = x, a, d;
  for (int l = 0; l < level; ++l) {
    dwt_step(cur, a, d);
    dec.details.push_back(d);
    cur = a;
  }
  dec.approx = cur;
  return dec;
}

DwtDecomposition dwt_db4(const Segment& s, int level) { return dwt_db4(s.samples, level); }

ArrayXd idwt_db4(const DwtDecomposition& d) {
  if (d.details.empty()) throw DataError("idwt_db4: empty decomposition");
  ArrayXd cur = d.approx, next;
  for (int l = d.level - 1; l >= 0; --l) {
    idwt_step(cur, d.details[static_cast<size_t>(l)], next);
    cur = next;
  }
  return cur;
}

DwtFeatures wavelet_features(const DwtDecomposition& d) {
  if (d.level != 3 || d.details.size() != 3)
    throw DataError("wavelet_features: expected a level-3 decomposition");
  const double e1 = d.details[0].square().sum();
  const double e2 = d.details[1].square().sum();
  const double e3 = d.details[2].square().sum();
  const double ea = d.approx.square().sum();
  const double total = e1 + e2 + e3 + ea;
  if (!(total > 0)) throw DegenerateSignal("wavelet_features: zero total energy");

  DwtFeatures f;
  f.energy_frac_d1 = e1 / total;
  f.energy_frac_d2 = e2 / total;
  f.energy_frac_d3 = e3 / total;
  f.energy_frac_a3 = ea / total;
  double entropy = 0;
  for (double p : {f.energy_frac_d1, f.energy_frac_d2, f.energy_frac_d3, f.energy_frac_a3})
    if (p > 0) entropy -= p * std::log(p);
  f.wavelet_entropy = entropy;
  return f;
}

void save_band_energy_csv(const std::string& path, const CwtBandResult& r, double fs_hz,
                          double t0_s, Index max_rows, const std::string& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "t_s,E\n";
  const Index n = r.energy.size();
  Index stride = 1;
  if (max_rows > 0 && n > max_rows) stride = (n + max_rows - 1) / max_rows;
  // When decimating, keep the block maximum so short events stay visible.
  for (Index i = 0; i < n; i += stride) {
    const Index len = std::min(stride, n - i);
    const double e = r.energy.segment(i, len).maxCoeff();
    out << format_double(t0_s + static_cast<double>(i) / fs_hz) << "," << format_double(e)
        << "\n";
  }
}

}  // namespace wavelet
}  // namespace ae
