// config.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/config.h"

#include <fstream>
#include <sstream>

#include "incar/core.h"

namespace incar {

namespace {
std::string Trim(const std::string &s) {
  const char *ws = " \t\r\n";
  size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}
}  // namespace

KeyValueConfig KeyValueConfig::Parse(std::istream &is) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) +
                  ": expected 'key = value'");
    std::string key = Trim(line.substr(0, eq));
    if (key.empty())
      throw Error("config line " + std::to_string(lineno) + ": empty key");
    cfg.Set(key, Trim(line.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::ParseString(const std::string &text) {
  std::istringstream is(text);
  return Parse(is);
}

KeyValueConfig KeyValueConfig::Load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config " + path);
  return Parse(is);
}

void KeyValueConfig::Set(const std::string &key, const std::string &value) {
  values_[key].push_back(value);
}

bool KeyValueConfig::Has(const std::string &key) const {
  return values_.count(key) > 0;
}

std::string KeyValueConfig::Get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("missing config key " + key);
  return it->second.back();
}

std::string KeyValueConfig::Get(const std::string &key,
                                const std::string &fallback) const {
  return Has(key) ? Get(key) : fallback;
}

std::vector<std::string> KeyValueConfig::GetAll(const std::string &key) const {
  auto it = values_.find(key);
  return it == values_.end() ? std::vector<std::string>{} : it->second;
}

double KeyValueConfig::GetDouble(const std::string &key, double fallback) const {
  if (!Has(key)) return fallback;
  try {
    size_t used = 0;
    std::string v = Get(key);
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw Error("config key " + key + " is not a number: " + Get(key));
  }
}

int KeyValueConfig::GetInt(const std::string &key, int fallback) const {
  if (!Has(key)) return fallback;
  try {
    size_t used = 0;
    std::string v = Get(key);
    int i = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception &) {
    throw Error("config key " + key + " is not an integer: " + Get(key));
  }
}

bool KeyValueConfig::GetBool(const std::string &key, bool fallback) const {
  if (!Has(key)) return fallback;
  std::string v = Get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config key " + key + " is not a boolean: " + v);
}

std::vector<double> KeyValueConfig::GetDoubles(const std::string &key) const {
  return ParseDoubles(Get(key));
}

std::vector<std::string> KeyValueConfig::Keys() const {
  std::vector<std::string> keys;
  for (const auto &kv : values_) keys.push_back(kv.first);
  return keys;
}

std::vector<double> ParseDoubles(const std::string &text) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception &) {
      throw Error("not a number: " + tok);
    }
  }
  return out;
}

}  // namespace incar
