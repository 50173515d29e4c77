// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_SIGNAL_WAVEFORM_H_
#define N2N_SIGNAL_WAVEFORM_H_

#include <span>
#include <string>
#include <vector>

namespace n2n::signal {

inline constexpr int kDefaultSampleRate = 8000;

// Mono audio, nominally in [-1, 1]. Always non-empty with finite samples.
class Waveform {
 public:
  Waveform(std::vector<double> samples, int sample_rate = kDefaultSampleRate);
  static Waveform Zeros(size_t length, int sample_rate = kDefaultSampleRate);

  size_t size() const { return samples_.size(); }
  int sample_rate() const { return sample_rate_; }
  double operator[](size_t i) const { return samples_[i]; }

  std::span<const double> samples() const { return samples_; }
  // Mutation must keep samples finite; callers that break it get caught by
  // the next Validate().
  std::vector<double> &mutable_samples() { return samples_; }
  void Validate() const;

  friend bool operator==(const Waveform &, const Waveform &) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_;
};

// Throws DataError when the sample rates differ. `what` names the operation.
void CheckSameRate(const Waveform &a, const Waveform &b, const char *what);
void CheckSameLength(const Waveform &a, const Waveform &b, const char *what);

Waveform operator+(const Waveform &a, const Waveform &b);
Waveform operator-(const Waveform &a, const Waveform &b);
Waveform operator*(double gain, const Waveform &a);

// Mean squared amplitude over the whole clip.
double MeanPower(std::span<const double> x);

// 16-bit PCM mono little-endian WAV. Reading anything else is a DataError that
// says exactly what was found. `expected_rate` <= 0 accepts any rate.
Waveform ReadWav(const std::string &path, int expected_rate = kDefaultSampleRate);

// Samples outside [-1, 1] are clipped on write; the count is returned.
size_t WriteWav(const std::string &path, const Waveform &wave);

// Bytes of a WAV file, as WriteWav would produce them.
std::string EncodeWav(const Waveform &wave, size_t *clipped = nullptr);
Waveform DecodeWav(const std::string &bytes, int expected_rate,
                   const std::string &origin);

}  // namespace n2n::signal

#endif  // N2N_SIGNAL_WAVEFORM_H_
