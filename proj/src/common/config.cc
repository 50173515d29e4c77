// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "n2n/common/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "n2n/common/error.h"
#include "n2n/common/log.h"

namespace n2n {
namespace {

std::string Trim(const std::string &s) {
  const char *ws = " \t\r\n";
  size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string &key, const std::string &text) {
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception &) {
    throw UsageError("config key '" + key + "': not a number: '" + text + "'");
  }
}

int64_t ParseInt(const std::string &key, const std::string &text) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("config key '" + key + "': not an integer: '" + text + "'");
  }
  return v;
}

}  // namespace

int &LogVerbosity() {
  static int verbosity = 1;
  return verbosity;
}

KeyValueConfig KeyValueConfig::Parse(const std::string &text) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    }
    std::string key = Trim(t.substr(0, eq));
    if (key.empty()) {
      throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    }
    kv.entries_[key] = Trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::string KeyValueConfig::Serialize() const {
  std::string out;
  for (const auto &[k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

bool KeyValueConfig::Has(const std::string &key) const {
  return entries_.count(key) > 0;
}

void KeyValueConfig::Set(const std::string &key, const std::string &value) {
  entries_[key] = value;
}
void KeyValueConfig::Set(const std::string &key, double value) {
  entries_[key] = FormatExact(value);
}
void KeyValueConfig::Set(const std::string &key, int64_t value) {
  entries_[key] = std::to_string(value);
}
void KeyValueConfig::Set(const std::string &key, bool value) {
  entries_[key] = value ? "true" : "false";
}

void KeyValueConfig::Get(const std::string &key, std::string *out) const {
  auto it = entries_.find(key);
  if (it != entries_.end()) *out = it->second;
}
void KeyValueConfig::Get(const std::string &key, double *out) const {
  auto it = entries_.find(key);
  if (it != entries_.end()) *out = ParseDouble(key, it->second);
}
void KeyValueConfig::Get(const std::string &key, int *out) const {
  auto it = entries_.find(key);
  if (it != entries_.end()) *out = static_cast<int>(ParseInt(key, it->second));
}
void KeyValueConfig::Get(const std::string &key, int64_t *out) const {
  auto it = entries_.find(key);
  if (it != entries_.end()) *out = ParseInt(key, it->second);
}
void KeyValueConfig::Get(const std::string &key, uint64_t *out) const {
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    int64_t v = ParseInt(key, it->second);
    if (v < 0) throw UsageError("config key '" + key + "' must be >= 0");
    *out = static_cast<uint64_t>(v);
  }
}
void KeyValueConfig::Get(const std::string &key, bool *out) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  if (it->second == "true" || it->second == "1") {
    *out = true;
  } else if (it->second == "false" || it->second == "0") {
    *out = false;
  } else {
    throw UsageError("config key '" + key + "': not a boolean: '" +
                     it->second + "'");
  }
}

void KeyValueConfig::Merge(const KeyValueConfig &other) {
  for (const auto &[k, v] : other.entries_) entries_[k] = v;
}

std::string FormatExact(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<double> ParseNumberList(const std::string &text) {
  std::vector<double> out;
  std::string t = Trim(text);
  if (t.empty()) throw UsageError("empty number list");
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty()) throw UsageError("malformed number list: '" + text + "'");
    out.push_back(ParseDouble("list", item));
  }
  if (!t.empty() && t.back() == ',') {
    throw UsageError("malformed number list: '" + text + "'");
  }
  return out;
}

uint64_t Fnv1a64(const std::string &bytes, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HashHex(uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string HashFileHex(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for hashing: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return HashHex(Fnv1a64(ss.str()));
}

}  // namespace n2n
