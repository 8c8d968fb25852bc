#include "ae/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ae/io.hpp"

namespace ae {
namespace detection {

double estimate_threshold(const ArrayXd& energy, const ThresholdSpec& spec, double fs_hz,
                          double t0_s) {
  if (!(spec.multiplier_k > 0)) throw DataError("estimate_threshold: k must be positive");
  const Index n = energy.size();
  Index lo = static_cast<Index>(std::ceil((spec.quiet_start_s - t0_s) * fs_hz));
  Index hi = static_cast<Index>(std::floor((spec.quiet_end_s - t0_s) * fs_hz));
  lo = std::max<Index>(0, lo);
  hi = std::min(n, hi);
  if (hi - lo < 1000)
    throw DataError("estimate_threshold: quiet interval holds fewer than 1000 samples");

  const auto quiet = energy.segment(lo, hi - lo);
  double threshold = 0;
  switch (spec.statistic) {
    case ThresholdStatistic::MeanPlusKStd: {
      const double mean = quiet.mean();
      const double var = (quiet - mean).square().mean();
      threshold = mean + spec.multiplier_k * std::sqrt(var);
      break;
    }
    case ThresholdStatistic::KTimesQuantile: {
      std::vector<double> sorted(quiet.data(), quiet.data() + quiet.size());
      std::sort(sorted.begin(), sorted.end());
      const double pos = spec.quantile_q * static_cast<double>(sorted.size() - 1);
      const auto i = static_cast<size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      const double q = i + 1 < sorted.size()
                           ? sorted[i] + frac * (sorted[i + 1] - sorted[i])
                           : sorted.back();
      threshold = spec.multiplier_k * q;
      break;
    }
  }
  if (!(threshold > 0))
    throw DegenerateSignal("estimate_threshold: quiet interval has no energy");
  return threshold;
}

std::vector<Run> detect_runs(const ArrayXd& energy, double threshold, Index min_duration,
                             Index merge_gap) {
  if (!(threshold > 0)) throw DataError("detect_runs: threshold must be positive");
  std::vector<Run> raw;
  const Index n = energy.size();
  Index i = 0;
  while (i < n) {
    if (energy[i] > threshold) {
      const Index start = i;
      while (i < n && energy[i] > threshold) ++i;
      raw.push_back({start, i - start});
    } else {
      ++i;
    }
  }

  std::vector<Run> merged;
  for (const Run& r : raw) {
    if (!merged.empty() && r.onset - (merged.back().onset + merged.back().duration) < merge_gap) {
      merged.back().duration = r.onset + r.duration - merged.back().onset;
    } else {
      merged.push_back(r);
    }
  }

  std::vector<Run> out;
  for (const Run& r : merged)
    if (r.duration >= min_duration) out.push_back(r);
  return out;
}

std::vector<Run> refine_run_onsets(const ArrayXd& energy, const std::vector<Run>& runs,
                                   double frac) {
  if (frac <= 0) return runs;
  std::vector<Run> out;
  out.reserve(runs.size());
  for (const Run& r : runs) {
    Index peak = r.onset;
    for (Index i = r.onset; i < r.onset + r.duration; ++i)
      if (energy[i] > energy[peak]) peak = i;
    const double level = frac * energy[peak];
    Index onset = r.onset;
    for (Index i = peak; i >= r.onset; --i) {
      if (energy[i] < level) {
        onset = i + 1;
        break;
      }
      if (i == r.onset) onset = r.onset;
    }
    out.push_back({onset, r.onset + r.duration - onset});
  }
  return out;
}

std::vector<AeEvent> events_from_runs(const std::vector<Run>& runs, double band_center_hz,
                                      const Waveform& w) {
  std::vector<AeEvent> events;
  events.reserve(runs.size());
  for (const Run& r : runs) {
    AeEvent e;
    e.onset_index = r.onset;
    e.duration_samples = r.duration;
    e.source_bands = {band_center_hz};
    e.energy = w.samples.segment(r.onset, r.duration).square().sum();
    e.end_time_s = w.t0_s + static_cast<double>(r.onset + r.duration) / w.sample_rate_hz;
    events.push_back(e);
  }
  return events;
}

std::vector<AeEvent> merge_band_events(const std::vector<std::vector<AeEvent>>& per_band,
                                       const Waveform& w) {
  std::vector<AeEvent> all;
  for (const auto& band : per_band) all.insert(all.end(), band.begin(), band.end());
  std::sort(all.begin(), all.end(), [](const AeEvent& a, const AeEvent& b) {
    return a.onset_index != b.onset_index ? a.onset_index < b.onset_index
                                          : a.duration_samples < b.duration_samples;
  });

  std::vector<AeEvent> merged;
  for (const AeEvent& e : all) {
    if (!merged.empty() && e.onset_index <= merged.back().end_index()) {
      AeEvent& m = merged.back();
      m.duration_samples = std::max(m.end_index(), e.end_index()) - m.onset_index;
      m.source_bands.insert(e.source_bands.begin(), e.source_bands.end());
    } else {
      merged.push_back(e);
    }
  }
  for (AeEvent& m : merged) {
    m.energy = w.samples.segment(m.onset_index, m.duration_samples).square().sum();
    m.end_time_s = w.t0_s + static_cast<double>(m.end_index()) / w.sample_rate_hz;
  }
  return merged;
}

std::vector<Segment> sample_non_events(const Waveform& w, const std::vector<AeEvent>& events,
                                       Index count, uint64_t rng_seed,
                                       Index fallback_duration) {
  struct Interval {
    Index begin, end;
  };
  std::vector<Interval> used;
  used.reserve(events.size());
  for (const AeEvent& e : events) used.push_back({e.onset_index, e.end_index()});
  std::sort(used.begin(), used.end(),
            [](const Interval& a, const Interval& b) { return a.begin < b.begin; });

  const Index n = w.samples.size();
  const auto free_intervals = [&]() {
    std::vector<Interval> free;
    Index cursor = 0;
    for (const Interval& u : used) {
      if (u.begin > cursor) free.push_back({cursor, u.begin});
      cursor = std::max(cursor, u.end);
    }
    if (cursor < n) free.push_back({cursor, n});
    return free;
  };

  std::vector<Index> durations;
  for (const AeEvent& e : events) durations.push_back(e.duration_samples);

  std::mt19937_64 rng(rng_seed);
  std::vector<Segment> out;
  out.reserve(static_cast<size_t>(count));
  for (Index placed = 0; placed < count; ++placed) {
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      Index dur;
      if (durations.empty()) {
        dur = std::min(fallback_duration, n);
      } else {
        std::uniform_int_distribution<size_t> pick(0, durations.size() - 1);
        dur = durations[pick(rng)];
      }
      const auto free = free_intervals();
      double capacity = 0;
      for (const Interval& f : free)
        if (f.end - f.begin >= dur) capacity += static_cast<double>(f.end - f.begin - dur + 1);
      if (capacity <= 0) continue;

      std::uniform_real_distribution<double> u(0.0, capacity);
      double r = u(rng);
      for (const Interval& f : free) {
        if (f.end - f.begin < dur) continue;
        const auto slots = static_cast<double>(f.end - f.begin - dur + 1);
        if (r < slots) {
          const Index start = f.begin + static_cast<Index>(r);
          out.push_back(take_segment(w, start, dur));
          used.push_back({start, start + dur});
          std::sort(used.begin(), used.end(),
                    [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
          ok = true;
          break;
        }
        r -= slots;
      }
    }
    if (!ok)
      throw DataError("sample_non_events: insufficient free signal; achievable count = " +
                      std::to_string(placed) + " of " + std::to_string(count));
  }
  return out;
}

void save_catalog_csv(const std::string& path, const std::vector<AeEvent>& events,
                      double fs_hz, double t0_s, const std::string& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "onset_s,duration_s,energy,bands\n";
  for (const AeEvent& e : events) {
    out << format_double(t0_s + static_cast<double>(e.onset_index) / fs_hz) << ","
        << format_double(static_cast<double>(e.duration_samples) / fs_hz) << ","
        << format_double(e.energy) << ",";
    bool first = true;
    for (double b : e.source_bands) {
      if (!first) out << ";";
      out << format_double(b);
      first = false;
    }
    out << "\n";
  }
}

std::vector<AeEvent> load_catalog_csv(const std::string& path, double fs_hz, double t0_s) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::vector<AeEvent> events;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("onset_s", 0) == 0) continue;
    std::stringstream ss(line);
    std::string tok;
    AeEvent e;
    std::getline(ss, tok, ',');
    const double onset_s = std::stod(tok);
    std::getline(ss, tok, ',');
    const double dur_s = std::stod(tok);
    std::getline(ss, tok, ',');
    e.energy = std::stod(tok);
    if (std::getline(ss, tok, ',')) {
      std::stringstream bs(tok);
      std::string b;
      while (std::getline(bs, b, ';'))
        if (!b.empty()) e.source_bands.insert(std::stod(b));
    }
    e.onset_index = static_cast<Index>(std::llround((onset_s - t0_s) * fs_hz));
    e.duration_samples = static_cast<Index>(std::llround(dur_s * fs_hz));
    e.end_time_s = t0_s + static_cast<double>(e.onset_index + e.duration_samples) / fs_hz;
    events.push_back(e);
  }
  return events;
}

}  // namespace detection
}  // namespace ae
