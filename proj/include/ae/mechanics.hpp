#pragma once

#include <vector>

#include "ae/detection.hpp"
#include "ae/types.hpp"

namespace ae {
namespace mechanics {

using detection::AeEvent;

/// Event energies placed on a time grid: each event contributes its energy at
/// the grid point nearest its end time; coincident events sum.
struct ImpulseTrain {
  ArrayXd times_s;
  ArrayXd magnitudes;
};

ImpulseTrain build_impulse_train(const std::vector<AeEvent>& events, const ArrayXd& grid_times_s);

/// Central finite differences of a moving-average-smoothed series; endpoints
/// one-sided. The averaging window is symmetric in sample count and shrinks
/// near the edges.
AuxChannel smoothed_derivative(const AuxChannel& ch, double window_s);

struct LagScan {
  int best_lag = 0;
  double best_corr = 0;
  std::vector<int> lags;
  std::vector<double> corr;
};

/// Pearson correlation of a[t] against b[t + lag] over their overlap for
/// lag in [-max_lag, max_lag]; best lag maximizes |corr|, ties to smaller
/// |lag| (positive first).
LagScan cross_correlate(const ArrayXd& a, const ArrayXd& b, int max_lag);

/// Step function of cumulative event energy ordered by end time.
struct StepCurve {
  ArrayXd times_s;
  ArrayXd values;
};

StepCurve cumulative_energy(const std::vector<AeEvent>& events);

/// Best two-segment least-squares fit with an exhaustive breakpoint search
/// over interior samples (outer 5% excluded); continuity not enforced.
struct BreakpointFit {
  double t_break_s = 0;
  double slope_before = 0, intercept_before = 0;
  double slope_after = 0, intercept_after = 0;
  double sse = 0;
  double sse_single_line = 0;
};

BreakpointFit two_line_fit(const AuxChannel& ch, double exclude_frac = 0.05);

/// Per-side event statistics and cluster prevalence around a breakpoint.
struct RegimeSide {
  Index event_count = 0;
  double event_rate_per_s = 0;
  double energy_rate_per_s = 0;
  double median_spectral_centroid_hz = 0;  // NaN when the side is empty
  double median_spectral_entropy = 0;      // NaN when the side is empty
  std::vector<Index> cluster_counts;
  std::vector<double> cluster_fractions;
};

struct RegimeReport {
  double t_break_s = 0;
  RegimeSide before;
  RegimeSide after;
};

/// centroids/entropies/cluster_labels are aligned with events. Events with
/// end time >= t_break fall on the "after" side. record_span is the total
/// [start, end] time range used for the rates.
RegimeReport regime_report(const std::vector<AeEvent>& events, const ArrayXd& centroids_hz,
                           const ArrayXd& entropies, const std::vector<int>& cluster_labels,
                           int n_clusters, double t_break_s,
                           std::pair<double, double> record_span);

/// Nearest-sample value of the (smoothed) stress derivative at each event's
/// end time; equidistant ties take the earlier sample.
ArrayXd attach_stress_derivative(const std::vector<AeEvent>& events, const AuxChannel& dstress);

}  // namespace mechanics
}  // namespace ae
