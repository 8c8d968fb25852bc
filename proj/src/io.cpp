#include "ae/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace ae {

namespace {

double parse_double(const std::string& text, const std::string& context) {
  double v = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr == begin)
    throw DataError("failed to parse number '" + text + "' in " + context);
  return v;
}

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

// Header form: "# fs_hz=<float> t0_s=<float>" (t0_s optional).
bool parse_csv_header(const std::string& line, double* fs, double* t0) {
  if (line.empty() || line[0] != '#') return false;
  auto grab = [&](const char* key, double* out) {
    auto pos = line.find(key);
    if (pos == std::string::npos) return;
    pos += std::strlen(key);
    auto end = line.find_first_of(" \t", pos);
    std::string tok = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    *out = parse_double(tok, "csv header");
  };
  grab("fs_hz=", fs);
  grab("t0_s=", t0);
  return true;
}

Waveform load_csv(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::vector<double> samples;
  double fs = opts.sample_rate_hz.value_or(0.0);
  double t0 = opts.t0_s;
  bool first = true;
  Index row = 0;
  while (std::getline(in, line)) {
    line = rstrip(line);
    if (first) {
      first = false;
      if (parse_csv_header(line, &fs, &t0)) continue;
    }
    if (line.empty() || line[0] == '#') continue;
    double v = parse_double(line, path);
    if (!std::isfinite(v))
      throw DataError(path + ": non-finite sample at index " + std::to_string(row));
    samples.push_back(v);
    ++row;
  }
  if (samples.empty()) throw EmptyInput(path + ": no samples");
  if (!(fs > 0)) throw DataError(path + ": sample rate not in header and not supplied");
  Waveform w;
  w.samples = Eigen::Map<const ArrayXd>(samples.data(), static_cast<Index>(samples.size()));
  w.sample_rate_hz = fs;
  w.t0_s = t0;
  return w;
}

Waveform load_f32(const std::string& path, const LoadOptions& opts) {
  if (!opts.sample_rate_hz) throw DataError(path + ": f32le input needs a configured sample rate");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<long long>(in.tellg());
  in.seekg(0);
  if (bytes == 0) throw EmptyInput(path + ": empty file");
  if (bytes % 4 != 0) throw DataError(path + ": size is not a multiple of 4 bytes");
  const Index n = bytes / 4;
  std::vector<float> buf(static_cast<size_t>(n));
  in.read(reinterpret_cast<char*>(buf.data()), bytes);
  if (!in) throw DataError(path + ": short read");
  Waveform w;
  w.samples.resize(n);
  for (Index i = 0; i < n; ++i) {
    const float v = buf[static_cast<size_t>(i)];
    if (!std::isfinite(v))
      throw DataError(path + ": non-finite sample at index " + std::to_string(i));
    w.samples[i] = static_cast<double>(v);
  }
  w.sample_rate_hz = *opts.sample_rate_hz;
  w.t0_s = opts.t0_s;
  return w;
}

uint32_t read_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t read_u16(std::ifstream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

Waveform load_wav(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) throw DataError(path + ": not a RIFF file");
  read_u32(in);
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) throw DataError(path + ": not a WAVE file");

  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  std::vector<char> data;
  while (in.read(tag, 4)) {
    uint32_t size = read_u32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      const uint16_t fmt = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);
      read_u16(in);
      bits = read_u16(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      if (fmt != 1) throw DataError(path + ": only PCM WAV is supported");
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      if (!in) throw DataError(path + ": truncated data chunk");
      break;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (rate == 0 || bits == 0) throw DataError(path + ": missing fmt chunk");
  if (data.empty()) throw EmptyInput(path + ": empty data chunk");
  if (channels != 1) throw DataError(path + ": multi-channel WAV is not supported");
  if (bits != 16 && bits != 24) throw DataError(path + ": only 16/24-bit PCM is supported");

  const int stride = bits / 8;
  const Index n = static_cast<Index>(data.size()) / stride;
  Waveform w;
  w.samples.resize(n);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  for (Index i = 0; i < n; ++i, p += stride) {
    int32_t v;
    if (bits == 16) {
      v = static_cast<int16_t>(p[0] | (p[1] << 8));
      w.samples[i] = static_cast<double>(v) / 32768.0;
    } else {
      v = static_cast<int32_t>((p[0] << 8 | p[1] << 16 | p[2] << 24)) >> 8;
      w.samples[i] = static_cast<double>(v) / 8388608.0;
    }
  }
  w.sample_rate_hz = static_cast<double>(rate);
  w.t0_s = opts.t0_s;
  return w;
}

}  // namespace

WaveFormat parse_wave_format(const std::string& name) {
  if (name == "csv") return WaveFormat::Csv;
  if (name == "f32le" || name == "f32" || name == "f32le-binary") return WaveFormat::F32le;
  if (name == "wav" || name == "wav-pcm") return WaveFormat::WavPcm;
  throw ConfigError("unknown waveform format '" + name + "'");
}

Waveform load_waveform(const std::string& path, WaveFormat format, const LoadOptions& opts) {
  Waveform w;
  switch (format) {
    case WaveFormat::Csv: w = load_csv(path, opts); break;
    case WaveFormat::F32le: w = load_f32(path, opts); break;
    case WaveFormat::WavPcm: w = load_wav(path, opts); break;
  }
  validate(w);
  return w;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void save_waveform_csv(const std::string& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << "# fs_hz=" << format_double(w.sample_rate_hz) << " t0_s=" << format_double(w.t0_s)
      << "\n";
  for (Index i = 0; i < w.samples.size(); ++i) out << format_double(w.samples[i]) << "\n";
}

void save_waveform_f32(const std::string& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  std::vector<float> buf(static_cast<size_t>(w.samples.size()));
  for (Index i = 0; i < w.samples.size(); ++i)
    buf[static_cast<size_t>(i)] = static_cast<float>(w.samples[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * 4));
}

AuxChannel load_aux_csv(const std::string& path, AuxChannel::Kind kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::vector<double> ts, vs;
  bool first = true;
  while (std::getline(in, line)) {
    line = rstrip(line);
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError(path + ": expected 'time_s,value' rows");
    if (first) {
      first = false;
      // Allow a textual header row.
      if (line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos) continue;
    }
    ts.push_back(parse_double(line.substr(0, comma), path));
    vs.push_back(parse_double(line.substr(comma + 1), path));
  }
  if (ts.empty()) throw EmptyInput(path + ": no rows");
  AuxChannel ch;
  ch.times_s = Eigen::Map<const ArrayXd>(ts.data(), static_cast<Index>(ts.size()));
  ch.values = Eigen::Map<const ArrayXd>(vs.data(), static_cast<Index>(vs.size()));
  ch.kind = kind;
  validate(ch);
  return ch;
}

void save_aux_csv(const std::string& path, const AuxChannel& ch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << "time_s,value\n";
  for (Index i = 0; i < ch.size(); ++i)
    out << format_double(ch.times_s[i]) << "," << format_double(ch.values[i]) << "\n";
}

}  // namespace ae
