// config.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_CONFIG_H_
#define INCAR_CONFIG_H_

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace incar {

// Plain-text "key = value" configuration. '#' starts a comment; keys may
// repeat, in which case Get returns the last value and GetAll every value
// in file order.
class KeyValueConfig {
 public:
  static KeyValueConfig Parse(std::istream &is);
  static KeyValueConfig ParseString(const std::string &text);
  static KeyValueConfig Load(const std::string &path);

  void Set(const std::string &key, const std::string &value);
  bool Has(const std::string &key) const;
  std::string Get(const std::string &key) const;
  std::string Get(const std::string &key, const std::string &fallback) const;
  std::vector<std::string> GetAll(const std::string &key) const;
  double GetDouble(const std::string &key, double fallback) const;
  int GetInt(const std::string &key, int fallback) const;
  bool GetBool(const std::string &key, bool fallback) const;
  // Whitespace-separated doubles.
  std::vector<double> GetDoubles(const std::string &key) const;
  std::vector<std::string> Keys() const;

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

std::vector<double> ParseDoubles(const std::string &text);

}  // namespace incar

#endif  // INCAR_CONFIG_H_
