#pragma once

#include <optional>
#include <string>

#include "ae/types.hpp"

namespace ae {

enum class WaveFormat { Csv, F32le, WavPcm };

WaveFormat parse_wave_format(const std::string& name);

struct LoadOptions {
  // Sample rate to assume when the file itself does not carry one
  // (f32le always, csv without a header line).
  std::optional<double> sample_rate_hz;
  double t0_s = 0.0;
};

// CSV layout: one sample per line, optional leading header
// "# fs_hz=<float> t0_s=<float>". Binary layout: raw little-endian 32-bit
// floats. WAV: mono 16- or 24-bit PCM, scaled to [-1, 1].
Waveform load_waveform(const std::string& path, WaveFormat format, const LoadOptions& opts = {});

void save_waveform_csv(const std::string& path, const Waveform& w);
void save_waveform_f32(const std::string& path, const Waveform& w);

// AuxChannel CSV: "time_s,value" rows; a non-numeric first line is skipped.
AuxChannel load_aux_csv(const std::string& path, AuxChannel::Kind kind);
void save_aux_csv(const std::string& path, const AuxChannel& ch);

// Shortest-width decimal that still round-trips a double (%.17g).
std::string format_double(double v);

}  // namespace ae
