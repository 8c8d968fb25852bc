#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ae {

using Eigen::ArrayXd;
using Eigen::Index;

// Error hierarchy. The CLI maps these onto exit codes: config 2, data 3,
// numerical 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
struct EmptyInput : DataError {
  using DataError::DataError;
};
struct DegenerateSignal : DataError {
  using DataError::DataError;
};

/// Uniformly sampled real-valued record.
struct Waveform {
  ArrayXd samples;
  double sample_rate_hz = 0.0;
  double t0_s = 0.0;

  Index size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
  double time_at(Index i) const { return t0_s + static_cast<double>(i) / sample_rate_hz; }
};

/// A snippet cut from a parent waveform. start_index is the offset of the
/// first sample in the parent.
struct Segment {
  ArrayXd samples;
  double sample_rate_hz = 0.0;
  Index start_index = 0;

  Index size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

/// Irregularly sampled auxiliary channel (stress in MPa or strain,
/// dimensionless). Times are strictly increasing.
struct AuxChannel {
  enum class Kind { Stress, Strain };

  ArrayXd times_s;
  ArrayXd values;
  Kind kind = Kind::Stress;

  Index size() const { return times_s.size(); }
};

void validate(const Waveform& w);
void validate(const Segment& s);
void validate(const AuxChannel& ch);

/// Copies samples [onset, onset + duration) out of a waveform.
Segment take_segment(const Waveform& w, Index onset, Index duration);

}  // namespace ae
