#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crmt/measures.hpp"

namespace crmt {

// Ordered key-value text block: one `key = value` per line, `#` comments.
// Used both for serializing measures and for experiment configuration.
class KvMap {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long value);
  void set(const std::string& key, std::uint64_t value);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long_or(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;  // space-separated

  // merge other over this; returns the keys that were overridden
  std::vector<std::string> merge_from(const KvMap& other);

  const std::vector<std::pair<std::string, std::string>>& items() const {
    return items_;
  }

  std::string print() const;
  static KvMap parse(const std::string& text);
  static KvMap load(const std::string& path);

 private:
  std::vector<std::pair<std::string, std::string>> items_;
  std::map<std::string, std::size_t> index_;
};

std::string format_double(double v);  // shortest round-trip decimal

// Key-value serialization of the measure types; `prefix` namespaces the keys
// so several objects can share one file.
void mixture_to_kv(const Mixture1D& m, const std::string& prefix, KvMap& kv);
Mixture1D mixture_from_kv(const KvMap& kv, const std::string& prefix);

void intensity_to_kv(const ScaledLevyIntensity& s, const std::string& prefix,
                     KvMap& kv);
ScaledLevyIntensity intensity_from_kv(const KvMap& kv,
                                      const std::string& prefix);

}  // namespace crmt
