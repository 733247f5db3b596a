#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>

#include "dnufft/spread.hpp"

namespace dnufft {

/// Spread parameters for one kernel width.
struct TuningEntry {
  std::array<int, 3> tile = kDefaultTile;
  int team = 4;
  int z_split = 0;  // 0: default_z_split(w)

  bool operator==(const TuningEntry&) const = default;
};

/// Per-width spread parameters. Text form:
///
///   [w=5]
///   tile = 8,8,4
///   team = 4
///   z_split = 4
///
/// Widths without a section, and keys missing from a section, use defaults.
class TuningTable {
 public:
  TuningEntry lookup(int width) const;
  bool contains(int width) const { return entries_.count(width) != 0; }
  void set(int width, const TuningEntry& entry);
  const std::map<int, TuningEntry>& entries() const { return entries_; }

  /// Variant for `algorithm` with this table's parameters for `width`.
  SpreadVariant variant(SpreadAlgorithm algorithm, int width) const;

  bool operator==(const TuningTable&) const = default;

  /// Table with an explicit default entry for every width in [3, 13].
  static TuningTable defaults();

 private:
  std::map<int, TuningEntry> entries_;
};

TuningTable parse_tuning_table(std::istream& in);
TuningTable load_tuning_table(const std::string& path);
void write_tuning_table(std::ostream& out, const TuningTable& table);
void save_tuning_table(const std::string& path, const TuningTable& table);

}  // namespace dnufft
