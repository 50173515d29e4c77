// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_COMMON_CONFIG_H_
#define N2N_COMMON_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace n2n {

// Flat `key = value` configuration. Lines starting with '#' are comments.
// Keys are kept sorted so serialization (and therefore hashing) is stable.
class KeyValueConfig {
 public:
  static KeyValueConfig Parse(const std::string &text);
  static KeyValueConfig Load(const std::string &path);

  std::string Serialize() const;

  bool Has(const std::string &key) const;
  void Set(const std::string &key, const std::string &value);
  void Set(const std::string &key, double value);
  void Set(const std::string &key, int64_t value);
  void Set(const std::string &key, int value) { Set(key, int64_t{value}); }
  void Set(const std::string &key, bool value);

  // Each getter leaves `*out` untouched when the key is absent.
  void Get(const std::string &key, std::string *out) const;
  void Get(const std::string &key, double *out) const;
  void Get(const std::string &key, int *out) const;
  void Get(const std::string &key, int64_t *out) const;
  void Get(const std::string &key, uint64_t *out) const;
  void Get(const std::string &key, bool *out) const;

  // Merges `other` on top of this config (other wins).
  void Merge(const KeyValueConfig &other);

  const std::map<std::string, std::string> &entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Formats a double so that parsing it back yields the same value.
std::string FormatExact(double value);

// Parses "a,b,c" into doubles; throws UsageError on empty or malformed input.
std::vector<double> ParseNumberList(const std::string &text);

// 64-bit FNV-1a, rendered as 16 hex digits.
uint64_t Fnv1a64(const std::string &bytes, uint64_t seed = 0xcbf29ce484222325ULL);
std::string HashHex(uint64_t hash);
std::string HashFileHex(const std::string &path);

}  // namespace n2n

#endif  // N2N_COMMON_CONFIG_H_
