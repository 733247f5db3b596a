#include "dnufft/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "dnufft/error.hpp"

namespace dnufft {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& value) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) return false;
  std::memcpy(&value, bytes, sizeof(T));
  return true;
}

}  // namespace

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) out.push_back(trim(piece));
  if (!text.empty() && text.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  const auto t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  require(ec == std::errc{} && ptr == t.data() + t.size() && !t.empty(), ErrorCode::ParseError,
          "invalid number for " + what + ": '" + text + "'");
  return value;
}

long long parse_int(const std::string& text, const std::string& what) {
  const auto t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  require(ec == std::errc{} && ptr == t.data() + t.size() && !t.empty(), ErrorCode::ParseError,
          "invalid integer for " + what + ": '" + text + "'");
  return value;
}

void write_particles_csv(std::ostream& out, const ParticleSet& ps) {
  out << "x,y,z,re,im\n";
  out.precision(17);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& x = ps.positions()[i];
    const auto f = ps.strengths()[i];
    out << x[0] << ',' << x[1] << ',' << x[2] << ',' << f.real() << ',' << f.imag() << '\n';
  }
}

ParticleSet read_particles_csv(std::istream& in, int dim, double length) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, "empty particle CSV");
  require(trim(line) == "x,y,z,re,im", ErrorCode::ParseError,
          "particle CSV header must be x,y,z,re,im");
  std::vector<Vec3> pos;
  std::vector<Complex> f;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cols = split_list(line);
    require(cols.size() == 5, ErrorCode::ParseError,
            "particle CSV row " + std::to_string(row) + " needs 5 columns");
    const std::string where = "row " + std::to_string(row);
    pos.push_back({parse_double(cols[0], where), parse_double(cols[1], where),
                   parse_double(cols[2], where)});
    f.emplace_back(parse_double(cols[3], where), parse_double(cols[4], where));
  }
  return ParticleSet(dim, length, std::move(pos), std::move(f));
}

void write_particles_binary(std::ostream& out, const ParticleSet& ps) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& x = ps.positions()[i];
    const auto f = ps.strengths()[i];
    put(out, x[0]);
    put(out, x[1]);
    put(out, x[2]);
    put(out, f.real());
    put(out, f.imag());
  }
}

ParticleSet read_particles_binary(std::istream& in, int dim, double length) {
  std::vector<Vec3> pos;
  std::vector<Complex> f;
  double v[5];
  for (;;) {
    if (!get(in, v[0])) break;
    for (int k = 1; k < 5; ++k)
      require(get(in, v[k]), ErrorCode::ParseError, "truncated particle record");
    pos.push_back({v[0], v[1], v[2]});
    f.emplace_back(v[3], v[4]);
  }
  return ParticleSet(dim, length, std::move(pos), std::move(f));
}

void write_grid_dump(std::ostream& out, const OversampledGrid& grid) {
  put<std::int64_t>(out, grid.dim());
  put<std::int64_t>(out, grid.modes());
  put<std::int64_t>(out, grid.fine());
  put<std::int64_t>(out, grid.halo());
  for (const auto& v : grid.owned_values()) {
    put(out, v.real());
    put(out, v.imag());
  }
}

GridDump read_grid_dump(std::istream& in) {
  GridDump d;
  require(get(in, d.dim) && get(in, d.modes) && get(in, d.fine) && get(in, d.halo),
          ErrorCode::ParseError, "truncated grid dump header");
  require(d.dim >= 1 && d.dim <= 3 && d.fine > 0 && d.fine <= (1 << 20), ErrorCode::ParseError,
          "implausible grid dump header");
  std::size_t limit = 1;
  for (std::int64_t a = 0; a < d.dim; ++a) limit *= static_cast<std::size_t>(d.fine);
  // The owned block may be any sub-box; its values run to the end of the stream.
  double re = 0.0;
  double im = 0.0;
  while (get(in, re)) {
    require(get(in, im), ErrorCode::ParseError, "truncated grid dump body");
    require(d.values.size() < limit, ErrorCode::ParseError, "grid dump body larger than the grid");
    d.values.emplace_back(re, im);
  }
  require(in.gcount() == 0, ErrorCode::ParseError, "truncated grid dump body");
  return d;
}

KeyValueSections parse_key_values(std::istream& in) {
  KeyValueSections out;
  std::string section;
  out[section];
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']' && line.size() > 2, ErrorCode::ParseError,
              "line " + std::to_string(row) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::ParseError,
            "line " + std::to_string(row) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    require(!key.empty(), ErrorCode::ParseError,
            "line " + std::to_string(row) + ": empty key");
    out[section][key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace dnufft
