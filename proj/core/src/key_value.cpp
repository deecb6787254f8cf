#include "artnav/key_value.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "artnav/errors.hpp"
#include "artnav/terrain_map.hpp"

namespace artnav {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, std::string source) {
  KeyValueFile f;
  f.source_ = std::move(source);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(f.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    KeyValueEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (e.key.empty()) throw FormatError(f.source_ + ":" + std::to_string(line_no) + ": empty key");
    f.entries_.push_back(std::move(e));
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return parse(in, path.string());
}

std::filesystem::path KeyValueFile::directory() const {
  return std::filesystem::path(source_).parent_path();
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return it->value;
  }
  return std::nullopt;
}

std::vector<std::string> KeyValueFile::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(e.value);
  }
  return out;
}

void KeyValueFile::fail(const KeyValueEntry& e, const std::string& msg) const {
  throw FormatError(source_ + ":" + std::to_string(e.line) + ": " + e.key + ": " + msg);
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  const KeyValueEntry* last = nullptr;
  for (const auto& e : entries_) {
    if (e.key == key) last = &e;
  }
  if (!last) return fallback;
  double v = 0.0;
  try {
    v = parse_double(last->value);
  } catch (const FormatError& ex) {
    fail(*last, ex.what());
  }
  if (!std::isfinite(v)) fail(*last, "value must be finite");
  return v;
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, fallback);
  if (v != std::floor(v)) throw FormatError(source_ + ": " + key + ": expected an integer");
  return static_cast<int>(v);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "on" || *v == "true" || *v == "1") return true;
  if (*v == "off" || *v == "false" || *v == "0") return false;
  throw FormatError(source_ + ": " + key + ": expected on|off");
}

void KeyValueFile::reject_unknown(const std::vector<std::string>& known) const {
  for (const auto& e : entries_) {
    const bool ok = std::any_of(known.begin(), known.end(), [&](const std::string& k) {
      if (!k.empty() && k.back() == '*') return e.key.rfind(k.substr(0, k.size() - 1), 0) == 0;
      return k == e.key;
    });
    if (!ok) fail(e, "unknown key");
  }
}

std::vector<double> parse_doubles(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream ss(s);
  std::vector<double> out;
  for (std::string tok; ss >> tok;) {
    const double v = parse_double(tok);
    if (!std::isfinite(v)) throw FormatError("non-finite value '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace artnav
