#include "artnav/terrain_map.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "artnav/errors.hpp"

namespace artnav {

namespace {

constexpr double kSnapTolerance = 1e-9;

bool same_bits(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

bool same_layer(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), same_bits);
}

// Grid coordinate with values within rounding noise of an integer snapped onto it,
// so that queries at cell centers hit the stored values exactly.
double grid_coordinate(double v, double origin, double resolution) {
  const double f = (v - origin) / resolution;
  const double r = std::round(f);
  return std::abs(f - r) < kSnapTolerance ? r : f;
}

}  // namespace

HeightMap::HeightMap()
    : HeightMap(centered_at(kDefaultCells, kDefaultCells, kDefaultResolution, {0.0, 0.0})) {}

HeightMap::HeightMap(int size_x, int size_y, double resolution, Vec2 origin)
    : size_x_(size_x), size_y_(size_y), resolution_(resolution), origin_(origin) {
  if (size_x <= 0 || size_y <= 0) throw std::invalid_argument("HeightMap: size must be positive");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("HeightMap: resolution must be positive and finite");
  }
  const auto n = static_cast<std::size_t>(size_x) * static_cast<std::size_t>(size_y);
  elevation_.assign(n, kUnknown);
  foothold_.assign(n, kUnknown);
  upper_bound_.assign(n, kUnknown);
  observed_.assign(n, 0);
  steppable_.assign(n, 0);
}

HeightMap HeightMap::centered_at(int size_x, int size_y, double resolution, Vec2 center) {
  const Vec2 origin{center.x - 0.5 * (size_x - 1) * resolution,
                    center.y - 0.5 * (size_y - 1) * resolution};
  return HeightMap(size_x, size_y, resolution, origin);
}

Vec2 HeightMap::grid_center() const {
  return {origin_.x + 0.5 * (size_x_ - 1) * resolution_,
          origin_.y + 0.5 * (size_y_ - 1) * resolution_};
}

void HeightMap::set_foothold(CellIndex c, double v) {
  if (is_known(v) && (v < 0.0 || v > 1.0)) {
    throw std::invalid_argument("HeightMap: foothold score outside [0,1]");
  }
  foothold_[linear(c)] = v;
}

CellIndex HeightMap::nearest_cell(double x, double y) const {
  return {static_cast<int>(std::floor(grid_coordinate(x, origin_.x, resolution_) + 0.5)),
          static_cast<int>(std::floor(grid_coordinate(y, origin_.y, resolution_) + 0.5))};
}

std::optional<CellIndex> HeightMap::world_to_cell(double x, double y) const {
  if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  const CellIndex c = nearest_cell(x, y);
  if (!contains(c)) return std::nullopt;
  return c;
}

double HeightMap::elevation_at(double x, double y) const {
  if (!world_to_cell(x, y)) return kUnknown;
  const double fx = grid_coordinate(x, origin_.x, resolution_);
  const double fy = grid_coordinate(y, origin_.y, resolution_);
  const int ix0 = static_cast<int>(std::floor(fx));
  const int iy0 = static_cast<int>(std::floor(fy));
  const double tx = fx - ix0;
  const double ty = fy - iy0;

  struct Corner {
    int dx, dy;
    double value;
  };
  std::array<Corner, 4> corners{{{0, 0, kUnknown}, {1, 0, kUnknown}, {0, 1, kUnknown}, {1, 1, kUnknown}}};
  bool all_known = true;
  for (auto& c : corners) {
    const CellIndex idx{ix0 + c.dx, iy0 + c.dy};
    if (contains(idx)) c.value = elevation(idx);
    all_known = all_known && is_known(c.value);
  }

  if (all_known) {
    return (1.0 - tx) * (1.0 - ty) * corners[0].value + tx * (1.0 - ty) * corners[1].value +
           (1.0 - tx) * ty * corners[2].value + tx * ty * corners[3].value;
  }

  double best = kUnknown;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& c : corners) {
    if (!is_known(c.value)) continue;
    const double d2 = (tx - c.dx) * (tx - c.dx) + (ty - c.dy) * (ty - c.dy);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = c.value;
    }
  }
  return best;
}

HeightMap HeightMap::recentered(Vec2 new_center) const {
  const Vec2 current = grid_center();
  const int shift_x = static_cast<int>(std::lround((new_center.x - current.x) / resolution_));
  const int shift_y = static_cast<int>(std::lround((new_center.y - current.y) / resolution_));
  if (shift_x == 0 && shift_y == 0) return *this;

  HeightMap out(size_x_, size_y_, resolution_,
                {origin_.x + shift_x * resolution_, origin_.y + shift_y * resolution_});
  out.sensor_z_ = sensor_z_;
  for (int iy = 0; iy < size_y_; ++iy) {
    const int src_y = iy + shift_y;
    if (src_y < 0 || src_y >= size_y_) continue;
    for (int ix = 0; ix < size_x_; ++ix) {
      const CellIndex src{ix + shift_x, src_y};
      if (!contains(src)) continue;
      const std::size_t from = linear(src);
      const std::size_t to = out.linear({ix, iy});
      out.elevation_[to] = elevation_[from];
      out.foothold_[to] = foothold_[from];
      out.upper_bound_[to] = upper_bound_[from];
      out.observed_[to] = observed_[from];
      out.steppable_[to] = steppable_[from];
    }
  }
  return out;
}

bool operator==(const HeightMap& a, const HeightMap& b) {
  return a.size_x_ == b.size_x_ && a.size_y_ == b.size_y_ &&
         same_bits(a.resolution_, b.resolution_) && same_bits(a.origin_.x, b.origin_.x) &&
         same_bits(a.origin_.y, b.origin_.y) && same_bits(a.sensor_z_, b.sensor_z_) &&
         same_layer(a.elevation_, b.elevation_) && same_layer(a.foothold_, b.foothold_) &&
         same_layer(a.upper_bound_, b.upper_bound_) && a.observed_ == b.observed_ &&
         a.steppable_ == b.steppable_;
}

// ---------------------------------------------------------------------------
// ahm 1 text format

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view token) {
  if (token == "nan") return kUnknown;
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw FormatError("invalid number '" + std::string(token) + "'");
  }
  return v;
}

namespace {

enum class LayerId { kElevation, kFoothold, kUpperBound, kObserved, kSteppable };

constexpr std::array<std::pair<std::string_view, LayerId>, 5> kLayerNames{{
    {"elevation", LayerId::kElevation},
    {"foothold", LayerId::kFoothold},
    {"upper_bound", LayerId::kUpperBound},
    {"observed", LayerId::kObserved},
    {"steppable", LayerId::kSteppable},
}};

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(std::move(tok));
  return out;
}

// Next non-empty, non-comment line; false at end of stream.
bool next_line(std::istream& in, std::vector<std::string>& tokens, int& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    tokens = split_ws(line);
    if (!tokens.empty()) return true;
  }
  return false;
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw FormatError("ahm line " + std::to_string(line_no) + ": " + msg);
}

int parse_int(const std::string& tok, int line_no) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) fail(line_no, "invalid integer '" + tok + "'");
  return v;
}

double parse_finite(const std::string& tok, int line_no, const char* what) {
  double v = 0.0;
  try {
    v = parse_double(tok);
  } catch (const FormatError& e) {
    fail(line_no, e.what());
  }
  if (!std::isfinite(v)) fail(line_no, std::string(what) + " must be finite");
  return v;
}

}  // namespace

void write_map(std::ostream& out, const HeightMap& map) {
  out << "ahm 1\n";
  out << "size " << map.size_x() << ' ' << map.size_y() << '\n';
  out << "resolution " << format_double(map.resolution()) << '\n';
  out << "origin " << format_double(map.origin().x) << ' ' << format_double(map.origin().y) << '\n';
  out << "sensor_z " << format_double(map.sensor_z()) << '\n';

  const auto write_rows = [&](auto layer, auto fmt) {
    for (int iy = 0; iy < map.size_y(); ++iy) {
      for (int ix = 0; ix < map.size_x(); ++ix) {
        if (ix > 0) out << ' ';
        out << fmt(layer[map.linear({ix, iy})]);
      }
      out << '\n';
    }
  };
  const auto fmt_d = [](double v) { return format_double(v); };
  const auto fmt_b = [](std::uint8_t v) { return v ? '1' : '0'; };

  out << "layer elevation\n";
  write_rows(map.elevation_layer(), fmt_d);
  out << "layer foothold\n";
  write_rows(map.foothold_layer(), fmt_d);
  out << "layer upper_bound\n";
  write_rows(map.upper_bound_layer(), fmt_d);
  out << "layer observed\n";
  write_rows(map.observed_layer(), fmt_b);
  out << "layer steppable\n";
  write_rows(map.steppable_layer(), fmt_b);
}

HeightMap read_map(std::istream& in) {
  std::vector<std::string> tok;
  int line_no = 0;
  if (!next_line(in, tok, line_no) || tok[0] != "ahm") fail(line_no, "missing 'ahm' magic line");
  if (tok.size() != 2) fail(line_no, "malformed magic line");
  if (tok[1] != "1") fail(line_no, "unsupported ahm version '" + tok[1] + "'");

  std::optional<std::pair<int, int>> size;
  std::optional<double> resolution;
  std::optional<Vec2> origin;
  double sensor_z = 0.0;

  bool have_line = next_line(in, tok, line_no);
  while (have_line && tok[0] != "layer") {
    const std::string& key = tok[0];
    if (key == "size") {
      if (tok.size() != 3) fail(line_no, "size expects 2 values");
      size = {parse_int(tok[1], line_no), parse_int(tok[2], line_no)};
      if (size->first <= 0 || size->second <= 0) fail(line_no, "size must be positive");
    } else if (key == "resolution") {
      if (tok.size() != 2) fail(line_no, "resolution expects 1 value");
      resolution = parse_finite(tok[1], line_no, "resolution");
      if (*resolution <= 0.0) fail(line_no, "resolution must be positive");
    } else if (key == "origin") {
      if (tok.size() != 3) fail(line_no, "origin expects 2 values");
      origin = Vec2{parse_finite(tok[1], line_no, "origin"), parse_finite(tok[2], line_no, "origin")};
    } else if (key == "sensor_z") {
      if (tok.size() != 2) fail(line_no, "sensor_z expects 1 value");
      sensor_z = parse_finite(tok[1], line_no, "sensor_z");
    } else {
      fail(line_no, "unknown header key '" + key + "'");
    }
    have_line = next_line(in, tok, line_no);
  }
  if (!size || !resolution || !origin) fail(line_no, "header requires size, resolution and origin");

  HeightMap map(size->first, size->second, *resolution, *origin);
  map.set_sensor_z(sensor_z);

  std::array<bool, kLayerNames.size()> seen{};
  while (have_line) {
    if (tok[0] != "layer" || tok.size() != 2) fail(line_no, "expected 'layer <name>'");
    const auto it = std::find_if(kLayerNames.begin(), kLayerNames.end(),
                                 [&](const auto& p) { return p.first == tok[1]; });
    if (it == kLayerNames.end()) fail(line_no, "unknown layer '" + tok[1] + "'");
    const auto slot = static_cast<std::size_t>(it - kLayerNames.begin());
    if (seen[slot]) fail(line_no, "duplicate layer '" + tok[1] + "'");
    seen[slot] = true;
    const LayerId id = it->second;

    for (int iy = 0; iy < map.size_y(); ++iy) {
      if (!next_line(in, tok, line_no) || tok[0] == "layer") {
        fail(line_no, "layer '" + std::string(it->first) + "' has " + std::to_string(iy) +
                          " rows, expected " + std::to_string(map.size_y()));
      }
      if (static_cast<int>(tok.size()) != map.size_x()) {
        fail(line_no, "row has " + std::to_string(tok.size()) + " values, expected " +
                          std::to_string(map.size_x()));
      }
      for (int ix = 0; ix < map.size_x(); ++ix) {
        const CellIndex c{ix, iy};
        const std::string& t = tok[static_cast<std::size_t>(ix)];
        if (id == LayerId::kObserved || id == LayerId::kSteppable) {
          if (t != "0" && t != "1") fail(line_no, "boolean layer value must be 0 or 1");
          (id == LayerId::kObserved ? map.set_observed(c, t == "1") : map.set_steppable(c, t == "1"));
          continue;
        }
        double v = 0.0;
        try {
          v = parse_double(t);
        } catch (const FormatError& e) {
          fail(line_no, e.what());
        }
        if (std::isinf(v)) fail(line_no, "layer values must be finite or nan");
        switch (id) {
          case LayerId::kElevation: map.set_elevation(c, v); break;
          case LayerId::kUpperBound: map.set_upper_bound(c, v); break;
          case LayerId::kFoothold:
            if (is_known(v) && (v < 0.0 || v > 1.0)) fail(line_no, "foothold score outside [0,1]");
            map.set_foothold(c, v);
            break;
          default: break;
        }
      }
    }
    have_line = next_line(in, tok, line_no);
  }
  return map;
}

void save_map(const std::filesystem::path& path, const HeightMap& map) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  write_map(out, map);
}

HeightMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open map '" + path.string() + "'");
  return read_map(in);
}

}  // namespace artnav
