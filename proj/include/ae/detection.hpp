#pragma once

#include <set>
#include <vector>

#include "ae/types.hpp"
#include "ae/wavelet.hpp"

namespace ae {
namespace detection {

/// A detected acoustic-emission event.
struct AeEvent {
  Index onset_index = 0;
  Index duration_samples = 0;
  std::set<double> source_bands;  // band centers, Hz
  double energy = 0.0;            // sum of x^2 over the event span
  double end_time_s = 0.0;        // t0 + (onset + duration) / fs

  Index end_index() const { return onset_index + duration_samples; }
};

enum class ThresholdStatistic { MeanPlusKStd, KTimesQuantile };

struct ThresholdSpec {
  double quiet_start_s = 0.0;
  double quiet_end_s = 0.0;
  double multiplier_k = 6.0;
  ThresholdStatistic statistic = ThresholdStatistic::MeanPlusKStd;
  double quantile_q = 0.99;  // used by KTimesQuantile
};

struct Run {
  Index onset = 0;
  Index duration = 0;
};

/// Noise-floor threshold from the quiet (dislocation-free) interval:
/// mean + k*std by default, or k * quantile. The interval must contain at
/// least 1000 samples.
double estimate_threshold(const ArrayXd& energy, const ThresholdSpec& spec, double fs_hz,
                          double t0_s);

/// Maximal runs of E > threshold; runs separated by fewer than merge_gap
/// samples are merged, then runs shorter than min_duration are dropped.
std::vector<Run> detect_runs(const ArrayXd& energy, double threshold, Index min_duration,
                             Index merge_gap);

/// Moves each run onset to the trailing edge of the first crossing of
/// frac * (run's peak energy), scanning back from the peak. Counteracts the
/// early bias the wavelet's time support gives threshold crossings.
/// frac <= 0 disables refinement.
std::vector<Run> refine_run_onsets(const ArrayXd& energy, const std::vector<Run>& runs,
                                   double frac);

/// Builds per-band events from runs; energy is summed over the waveform span.
std::vector<AeEvent> events_from_runs(const std::vector<Run>& runs, double band_center_hz,
                                      const Waveform& w);

/// Interval union across bands. Overlapping or adjacent events merge into one
/// event whose source_bands is the union and whose energy is recomputed over
/// the merged span.
std::vector<AeEvent> merge_band_events(const std::vector<std::vector<AeEvent>>& per_band,
                                       const Waveform& w);

/// `count` segments with durations drawn from the empirical event-duration
/// distribution, disjoint from all events and from each other. Deterministic
/// given the seed. fallback_duration is used when the event list is empty.
std::vector<Segment> sample_non_events(const Waveform& w, const std::vector<AeEvent>& events,
                                       Index count, uint64_t rng_seed,
                                       Index fallback_duration = 1024);

void save_catalog_csv(const std::string& path, const std::vector<AeEvent>& events,
                      double fs_hz, double t0_s, const std::string& provenance = "");
std::vector<AeEvent> load_catalog_csv(const std::string& path, double fs_hz, double t0_s);

}  // namespace detection
}  // namespace ae
