#include "dnufft/tuning.hpp"

#include <fstream>
#include <ostream>

#include "dnufft/error.hpp"
#include "dnufft/io.hpp"

namespace dnufft {

namespace {

constexpr int kMaxTile = 256;
constexpr int kMaxTeam = 64;

void validate(int width, const TuningEntry& e) {
  require(width >= kMinWidth && width <= kMaxWidth, ErrorCode::InvalidArgument,
          "tuning width out of range: " + std::to_string(width));
  for (int t : e.tile)
    require(t >= 1 && t <= kMaxTile, ErrorCode::InvalidArgument,
            "tile extent out of range for w=" + std::to_string(width));
  require(e.team >= 1 && e.team <= kMaxTeam, ErrorCode::InvalidArgument,
          "team size out of range for w=" + std::to_string(width));
  require(e.z_split >= 0 && e.z_split <= width, ErrorCode::InvalidArgument,
          "z_split out of range for w=" + std::to_string(width));
}

int parse_width(const std::string& section) {
  const auto eq = section.find('=');
  require(eq != std::string::npos && trim(section.substr(0, eq)) == "w", ErrorCode::ParseError,
          "tuning sections must be named [w=<width>], got [" + section + "]");
  return static_cast<int>(parse_int(section.substr(eq + 1), "section width"));
}

}  // namespace

TuningEntry TuningTable::lookup(int width) const {
  const auto it = entries_.find(width);
  return it == entries_.end() ? TuningEntry{} : it->second;
}

void TuningTable::set(int width, const TuningEntry& entry) {
  validate(width, entry);
  entries_[width] = entry;
}

SpreadVariant TuningTable::variant(SpreadAlgorithm algorithm, int width) const {
  const auto e = lookup(width);
  SpreadVariant v;
  v.algorithm = algorithm;
  v.tile = e.tile;
  v.team_size = e.team;
  v.z_split = e.z_split;
  return v;
}

TuningTable TuningTable::defaults() {
  TuningTable t;
  for (int w = kMinSelectedWidth; w <= kMaxSelectedWidth; ++w) {
    TuningEntry e;
    e.z_split = default_z_split(w);
    t.set(w, e);
  }
  return t;
}

TuningTable parse_tuning_table(std::istream& in) {
  TuningTable table;
  for (const auto& [section, keys] : parse_key_values(in)) {
    if (section.empty()) {
      require(keys.empty(), ErrorCode::ParseError, "tuning keys must be inside a [w=...] section");
      continue;
    }
    const int width = parse_width(section);
    TuningEntry e;
    for (const auto& [key, value] : keys) {
      if (key == "tile") {
        const auto parts = split_list(value);
        require(parts.size() == 3, ErrorCode::ParseError, "tile needs three extents");
        for (int a = 0; a < 3; ++a)
          e.tile[static_cast<std::size_t>(a)] = static_cast<int>(parse_int(parts[a], "tile"));
      } else if (key == "team") {
        e.team = static_cast<int>(parse_int(value, "team"));
      } else if (key == "z_split") {
        e.z_split = static_cast<int>(parse_int(value, "z_split"));
      } else {
        fail(ErrorCode::ParseError, "unknown tuning key '" + key + "'");
      }
    }
    table.set(width, e);
  }
  return table;
}

TuningTable load_tuning_table(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::InvalidArgument, "cannot open tuning table " + path);
  return parse_tuning_table(in);
}

void write_tuning_table(std::ostream& out, const TuningTable& table) {
  bool first = true;
  for (const auto& [w, e] : table.entries()) {
    if (!first) out << '\n';
    first = false;
    out << "[w=" << w << "]\n"
        << "tile = " << e.tile[0] << ',' << e.tile[1] << ',' << e.tile[2] << '\n'
        << "team = " << e.team << '\n'
        << "z_split = " << e.z_split << '\n';
  }
}

void save_tuning_table(const std::string& path, const TuningTable& table) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write tuning table " + path);
  write_tuning_table(out, table);
}

}  // namespace dnufft
