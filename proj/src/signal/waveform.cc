// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/signal/waveform.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "n2n/common/error.h"

namespace n2n::signal {

Waveform::Waveform(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  Validate();
}

Waveform Waveform::Zeros(size_t length, int sample_rate) {
  return Waveform(std::vector<double>(length, 0.0), sample_rate);
}

void Waveform::Validate() const {
  if (sample_rate_ <= 0) throw DataError("waveform sample rate must be positive");
  if (samples_.empty()) throw DataError("waveform must have at least one sample");
  for (size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw DataError("waveform sample " + std::to_string(i) + " is not finite");
    }
  }
}

void CheckSameRate(const Waveform &a, const Waveform &b, const char *what) {
  if (a.sample_rate() != b.sample_rate()) {
    throw DataError(std::string(what) + ": sample rates differ (" +
                    std::to_string(a.sample_rate()) + " vs " +
                    std::to_string(b.sample_rate()) + " Hz)");
  }
}

void CheckSameLength(const Waveform &a, const Waveform &b, const char *what) {
  CheckSameRate(a, b, what);
  if (a.size() != b.size()) {
    throw DataError(std::string(what) + ": lengths differ (" +
                    std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
}

Waveform operator+(const Waveform &a, const Waveform &b) {
  CheckSameLength(a, b, "waveform addition");
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Waveform(std::move(out), a.sample_rate());
}

Waveform operator-(const Waveform &a, const Waveform &b) {
  CheckSameLength(a, b, "waveform subtraction");
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return Waveform(std::move(out), a.sample_rate());
}

Waveform operator*(double gain, const Waveform &a) {
  std::vector<double> out(a.samples().begin(), a.samples().end());
  for (double &v : out) v *= gain;
  return Waveform(std::move(out), a.sample_rate());
}

double MeanPower(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

namespace {

void PutU32(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU16(std::string *out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}
uint32_t GetU32(const std::string &b, size_t at) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}
uint16_t GetU16(const std::string &b, size_t at) {
  return static_cast<uint16_t>(static_cast<unsigned char>(b[at]) |
                               (static_cast<unsigned char>(b[at + 1]) << 8));
}

}  // namespace

std::string EncodeWav(const Waveform &wave, size_t *clipped) {
  const uint32_t data_bytes = static_cast<uint32_t>(wave.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(&out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate()));
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate()) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  out += "data";
  PutU32(&out, data_bytes);
  size_t n_clipped = 0;
  for (double v : wave.samples()) {
    if (v > 1.0 || v < -1.0) ++n_clipped;
    double c = std::clamp(v, -1.0, 1.0);
    long q = std::lround(c * 32767.0);
    PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  if (clipped) *clipped = n_clipped;
  return out;
}

size_t WriteWav(const std::string &path, const Waveform &wave) {
  size_t clipped = 0;
  std::string bytes = EncodeWav(wave, &clipped);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
  return clipped;
}

Waveform DecodeWav(const std::string &b, int expected_rate,
                   const std::string &origin) {
  auto fail = [&](const std::string &why) {
    return DataError(origin + ": " + why +
                     " (expected 16-bit PCM mono WAV at 8000 Hz)");
  };
  if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0) {
    throw fail("not a RIFF/WAVE file");
  }
  size_t pos = 12;
  bool have_fmt = false;
  int rate = 0;
  while (pos + 8 <= b.size()) {
    std::string id = b.substr(pos, 4);
    uint32_t len = GetU32(b, pos + 4);
    size_t body = pos + 8;
    if (body + len > b.size()) {
      if (id != "data") throw fail("truncated chunk '" + id + "'");
      len = static_cast<uint32_t>(b.size() - body);
    }
    if (id == "fmt ") {
      if (len < 16) throw fail("fmt chunk too short");
      uint16_t format = GetU16(b, body);
      uint16_t channels = GetU16(b, body + 2);
      rate = static_cast<int>(GetU32(b, body + 4));
      uint16_t bits = GetU16(b, body + 14);
      if (format != 1) {
        throw fail("unsupported audio format tag " + std::to_string(format));
      }
      if (channels != 1) {
        throw fail("found " + std::to_string(channels) + " channels");
      }
      if (bits != 16) throw fail("found " + std::to_string(bits) + "-bit samples");
      if (expected_rate > 0 && rate != expected_rate) {
        throw fail("found sample rate " + std::to_string(rate) + " Hz");
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      size_t n = len / 2;
      if (n == 0) throw fail("no samples");
      std::vector<double> samples(n);
      for (size_t i = 0; i < n; ++i) {
        samples[i] = static_cast<int16_t>(GetU16(b, body + 2 * i)) / 32767.0;
      }
      return Waveform(std::move(samples), rate);
    }
    pos = body + len + (len & 1);
  }
  throw fail("no data chunk");
}

Waveform ReadWav(const std::string &path, int expected_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return DecodeWav(ss.str(), expected_rate, path);
}

}  // namespace n2n::signal
