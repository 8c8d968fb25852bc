#include "ae/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ae {
namespace mechanics {

namespace {

Index nearest_grid_index(const ArrayXd& times, double t) {
  const double* begin = times.data();
  const double* end = begin + times.size();
  const double* it = std::lower_bound(begin, end, t);
  if (it == begin) return 0;
  if (it == end) return times.size() - 1;
  const Index hi = it - begin;
  const Index lo = hi - 1;
  // Equidistant ties go to the earlier sample.
  return (t - times[lo] <= times[hi] - t) ? lo : hi;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (lo + m);
  }
  return m;
}

struct LineFit {
  double slope = 0, intercept = 0, sse = 0;
};

LineFit ols_line(const ArrayXd& t, const ArrayXd& v, Index begin, Index end) {
  const Index n = end - begin;
  const auto ts = t.segment(begin, n);
  const auto vs = v.segment(begin, n);
  const double tm = ts.mean(), vm = vs.mean();
  const double stt = (ts - tm).square().sum();
  LineFit f;
  if (stt > 0) {
    f.slope = ((ts - tm) * (vs - vm)).sum() / stt;
  } else {
    f.slope = 0;
  }
  f.intercept = vm - f.slope * tm;
  f.sse = (vs - (f.slope * ts + f.intercept)).square().sum();
  return f;
}

}  // namespace

ImpulseTrain build_impulse_train(const std::vector<AeEvent>& events,
                                 const ArrayXd& grid_times_s) {
  if (grid_times_s.size() == 0) throw EmptyInput("build_impulse_train: empty grid");
  ImpulseTrain train;
  train.times_s = grid_times_s;
  train.magnitudes = ArrayXd::Zero(grid_times_s.size());
  for (const AeEvent& e : events)
    train.magnitudes[nearest_grid_index(grid_times_s, e.end_time_s)] += e.energy;
  return train;
}

AuxChannel smoothed_derivative(const AuxChannel& ch, double window_s) {
  const Index n = ch.size();
  if (n < 3) throw DataError("smoothed_derivative: need at least 3 points");

  std::vector<double> dts(static_cast<size_t>(n - 1));
  for (Index i = 0; i + 1 < n; ++i) dts[static_cast<size_t>(i)] = ch.times_s[i + 1] - ch.times_s[i];
  std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
  const double dt_med = dts[dts.size() / 2];
  const Index r = std::max<Index>(1, static_cast<Index>(std::lround(window_s / (2.0 * dt_med))));

  ArrayXd smooth(n);
  for (Index i = 0; i < n; ++i) {
    const Index ri = std::min({r, i, n - 1 - i});
    smooth[i] = ch.values.segment(i - ri, 2 * ri + 1).mean();
  }

  AuxChannel out;
  out.kind = ch.kind;
  out.times_s = ch.times_s;
  out.values.resize(n);
  out.values[0] = (smooth[1] - smooth[0]) / (ch.times_s[1] - ch.times_s[0]);
  for (Index i = 1; i + 1 < n; ++i)
    out.values[i] = (smooth[i + 1] - smooth[i - 1]) / (ch.times_s[i + 1] - ch.times_s[i - 1]);
  out.values[n - 1] = (smooth[n - 1] - smooth[n - 2]) / (ch.times_s[n - 1] - ch.times_s[n - 2]);
  return out;
}

LagScan cross_correlate(const ArrayXd& a, const ArrayXd& b, int max_lag) {
  const Index n = a.size();
  if (n != b.size() || n < 3) throw DataError("cross_correlate: need equal lengths >= 3");
  const auto is_constant = [](const ArrayXd& x) {
    return (x - x[0]).abs().maxCoeff() == 0;
  };
  if (is_constant(a) || is_constant(b))
    throw DegenerateSignal("cross_correlate: constant series");

  const auto pearson = [&](int lag) {
    const Index t0 = std::max<Index>(0, -lag);
    const Index t1 = n - 1 - std::max<Index>(0, lag);
    const Index m = t1 - t0 + 1;
    if (m < 2) return 0.0;
    const auto xs = a.segment(t0, m);
    const auto ys = b.segment(t0 + lag, m);
    const double xm = xs.mean(), ym = ys.mean();
    const double sx = (xs - xm).square().sum(), sy = (ys - ym).square().sum();
    if (!(sx > 0) || !(sy > 0)) return 0.0;
    return ((xs - xm) * (ys - ym)).sum() / std::sqrt(sx * sy);
  };

  LagScan scan;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    scan.lags.push_back(lag);
    scan.corr.push_back(pearson(lag));
  }
  // Scan 0, +1, -1, +2, -2, ... so ties resolve to the smaller |lag|.
  double best_abs = -1;
  for (int k = 0; k <= max_lag; ++k) {
    for (const int lag : {k, -k}) {
      if (k == 0 && lag != 0) continue;
      const double c = scan.corr[static_cast<size_t>(lag + max_lag)];
      if (std::abs(c) > best_abs) {
        best_abs = std::abs(c);
        scan.best_lag = lag;
        scan.best_corr = c;
      }
    }
  }
  return scan;
}

StepCurve cumulative_energy(const std::vector<AeEvent>& events) {
  std::vector<const AeEvent*> sorted;
  sorted.reserve(events.size());
  for (const AeEvent& e : events) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const AeEvent* a, const AeEvent* b) { return a->end_time_s < b->end_time_s; });
  StepCurve curve;
  curve.times_s.resize(static_cast<Index>(sorted.size()));
  curve.values.resize(static_cast<Index>(sorted.size()));
  double acc = 0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    acc += sorted[i]->energy;
    curve.times_s[static_cast<Index>(i)] = sorted[i]->end_time_s;
    curve.values[static_cast<Index>(i)] = acc;
  }
  return curve;
}

BreakpointFit two_line_fit(const AuxChannel& ch, double exclude_frac) {
  const Index n = ch.size();
  if (n < 6) throw DataError("two_line_fit: need at least 6 points");
  const ArrayXd& t = ch.times_s;
  const ArrayXd& v = ch.values;

  const Index margin = std::max<Index>(
      2, static_cast<Index>(std::ceil(exclude_frac * static_cast<double>(n))));
  const Index j_min = margin, j_max = n - margin;  // split j: left [0,j), right [j,n)
  if (j_min >= j_max) throw DataError("two_line_fit: too few interior candidates");

  std::vector<double> sse(static_cast<size_t>(j_max - j_min));
  for (Index j = j_min; j < j_max; ++j) {
    const LineFit left = ols_line(t, v, 0, j);
    const LineFit right = ols_line(t, v, j, n);
    sse[static_cast<size_t>(j - j_min)] = left.sse + right.sse;
  }

  const double min_sse = *std::min_element(sse.begin(), sse.end());
  const double vm = v.mean();
  const double tss = (v - vm).square().sum();
  const double tie_tol = 1e-12 * tss;
  std::vector<Index> tied;
  for (Index j = j_min; j < j_max; ++j)
    if (sse[static_cast<size_t>(j - j_min)] <= min_sse + tie_tol) tied.push_back(j);
  const Index j_star = tied[tied.size() / 2];

  const LineFit left = ols_line(t, v, 0, j_star);
  const LineFit right = ols_line(t, v, j_star, n);
  const LineFit single = ols_line(t, v, 0, n);

  BreakpointFit fit;
  fit.t_break_s = 0.5 * (t[j_star - 1] + t[j_star]);
  fit.slope_before = left.slope;
  fit.intercept_before = left.intercept;
  fit.slope_after = right.slope;
  fit.intercept_after = right.intercept;
  fit.sse = left.sse + right.sse;
  fit.sse_single_line = single.sse;
  return fit;
}

RegimeReport regime_report(const std::vector<AeEvent>& events, const ArrayXd& centroids_hz,
                           const ArrayXd& entropies, const std::vector<int>& cluster_labels,
                           int n_clusters, double t_break_s,
                           std::pair<double, double> record_span) {
  const auto n = static_cast<Index>(events.size());
  if (centroids_hz.size() != n || entropies.size() != n ||
      static_cast<Index>(cluster_labels.size()) != n)
    throw DataError("regime_report: feature/label arrays must align with events");

  RegimeReport report;
  report.t_break_s = t_break_s;
  const double span_before = t_break_s - record_span.first;
  const double span_after = record_span.second - t_break_s;

  for (int side = 0; side < 2; ++side) {
    RegimeSide& out = side == 0 ? report.before : report.after;
    out.cluster_counts.assign(static_cast<size_t>(n_clusters), 0);
    out.cluster_fractions.assign(static_cast<size_t>(n_clusters), 0.0);
    std::vector<double> med_centroid, med_entropy;
    double energy = 0;
    for (Index i = 0; i < n; ++i) {
      const bool after = events[static_cast<size_t>(i)].end_time_s >= t_break_s;
      if (after != (side == 1)) continue;
      out.event_count += 1;
      energy += events[static_cast<size_t>(i)].energy;
      med_centroid.push_back(centroids_hz[i]);
      med_entropy.push_back(entropies[i]);
      const int c = cluster_labels[static_cast<size_t>(i)];
      if (c >= 0 && c < n_clusters) out.cluster_counts[static_cast<size_t>(c)] += 1;
    }
    const double span = side == 0 ? span_before : span_after;
    out.event_rate_per_s = span > 0 ? static_cast<double>(out.event_count) / span : 0.0;
    out.energy_rate_per_s = span > 0 ? energy / span : 0.0;
    out.median_spectral_centroid_hz = median(std::move(med_centroid));
    out.median_spectral_entropy = median(std::move(med_entropy));
    if (out.event_count > 0) {
      for (size_t c = 0; c < out.cluster_counts.size(); ++c)
        out.cluster_fractions[c] =
            static_cast<double>(out.cluster_counts[c]) / static_cast<double>(out.event_count);
    }
  }
  return report;
}

ArrayXd attach_stress_derivative(const std::vector<AeEvent>& events, const AuxChannel& dstress) {
  ArrayXd out(static_cast<Index>(events.size()));
  for (size_t i = 0; i < events.size(); ++i)
    out[static_cast<Index>(i)] = dstress.values[nearest_grid_index(dstress.times_s, events[i].end_time_s)];
  return out;
}

}  // namespace mechanics
}  // namespace ae
