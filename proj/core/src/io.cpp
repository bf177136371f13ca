#include "fdlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fdlab/errors.hpp"
#include "fdlab/grid.hpp"

namespace fdlab {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    fail(ErrorCode::IoError, "not a number in " + where + ": '" + text + "'");
  }
  return value;
}

long parse_long(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0') {
    fail(ErrorCode::IoError, "not an integer in " + where + ": '" + text + "'");
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoError, "read failed on " + path);
  return buf.str();
}

std::string dir_of(const std::string& path) {
  const std::size_t pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

const std::string& require_key(const std::map<std::string, std::string>& meta,
                               const std::string& key, const std::string& path) {
  const auto it = meta.find(key);
  if (it == meta.end()) fail(ErrorCode::IoError, path + " is missing metadata key '" + key + "'");
  return it->second;
}

}  // namespace

std::string g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCode::IoError, "write failed on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    fail(ErrorCode::IoError, "cannot rename " + tmp + " to " + path);
  }
}

void write_snapshot(const std::string& path, const Profile& u, const ModelParams& p,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  const RadialGrid& g = *u.grid;
  std::ostringstream out;
  out << "# fdlab snapshot\n";
  out << "# variant=" << variant_name(p.variant) << "\n";
  out << "# dim=" << p.dim << "\n";
  out << "# lambda=" << g17(p.lambda) << "\n";
  out << "# q=" << g17(p.q) << "\n";
  out << "# mass=" << g17(p.mass) << "\n";
  out << "# radius=" << g17(g.radius) << "\n";
  out << "# cells=" << g.size() << "\n";
  for (const auto& [key, value] : extra) out << "# " << key << "=" << value << "\n";
  const bool has_mode1 = u.mode1.has_value();
  out << (has_mode1 ? "r,density,mode1\n" : "r,density\n");
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << g17(g.centers[i]) << ',' << g17(u.density[i]);
    if (has_mode1) out << ',' << g17((*u.mode1)[i]);
    out << '\n';
  }
  atomic_write(path, out.str());
}

SnapshotData read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);

  SnapshotData snap;
  std::string line;
  std::vector<std::string> columns;
  std::vector<double> r, density, mode1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::size_t key_start = 1;
      while (key_start < eq && line[key_start] == ' ') ++key_start;
      snap.meta[line.substr(key_start, eq - key_start)] = line.substr(eq + 1);
      continue;
    }
    if (columns.empty()) {
      columns = split(line, ',');
      if (columns.size() != 2 && columns.size() != 3) {
        fail(ErrorCode::IoError, path + " has an unexpected column header '" + line + "'");
      }
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != columns.size()) {
      fail(ErrorCode::IoError, path + " row has " + std::to_string(fields.size()) +
                                   " fields, expected " + std::to_string(columns.size()));
    }
    r.push_back(parse_double(fields[0], path));
    density.push_back(parse_double(fields[1], path));
    if (columns.size() == 3) mode1.push_back(parse_double(fields[2], path));
  }
  if (columns.empty() || r.empty()) fail(ErrorCode::IoError, path + " contains no data rows");

  ModelParams p;
  const std::string variant = require_key(snap.meta, "variant", path);
  if (variant == "drift") {
    p.variant = Variant::Drift;
  } else if (variant == "meanfield") {
    p.variant = Variant::MeanField;
  } else {
    fail(ErrorCode::IoError, path + " has unknown variant '" + variant + "'");
  }
  p.dim = static_cast<int>(parse_long(require_key(snap.meta, "dim", path), path));
  p.lambda = parse_double(require_key(snap.meta, "lambda", path), path);
  p.q = parse_double(require_key(snap.meta, "q", path), path);
  p.mass = parse_double(require_key(snap.meta, "mass", path), path);
  snap.params = validate_params(p);

  const double radius = parse_double(require_key(snap.meta, "radius", path), path);
  const long cells = parse_long(require_key(snap.meta, "cells", path), path);
  if (cells <= 0 || static_cast<std::size_t>(cells) != r.size()) {
    fail(ErrorCode::IoError, path + " declares " + std::to_string(cells) + " cells but carries " +
                                 std::to_string(r.size()) + " rows");
  }
  auto grid = std::make_shared<RadialGrid>(build_grid(p.dim, radius, r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (std::abs(r[i] - grid->centers[i]) > 1e-9 * std::max(1.0, radius)) {
      fail(ErrorCode::IoError, path + " row " + std::to_string(i) + " is not at a cell center");
    }
  }
  snap.profile = make_profile(std::move(grid), std::move(density),
                              mode1.empty() ? std::nullopt : std::make_optional(std::move(mode1)));
  return snap;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  if (columns.empty()) fail(ErrorCode::IoError, "csv needs at least one column: " + path);
  std::ostringstream out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out << ',';
    out << columns[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) {
      fail(ErrorCode::IoError, "csv row width mismatch writing " + path);
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << g17(row[j]);
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

std::vector<double> Table::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] != name) continue;
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& row : rows) values.push_back(row[j]);
    return values;
  }
  fail(ErrorCode::IoError, "csv has no column '" + name + "'");
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  Table table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (table.columns.empty()) {
      table.columns = split(line, ',');
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != table.columns.size()) {
      fail(ErrorCode::IoError, path + " row has " + std::to_string(fields.size()) +
                                   " fields, expected " + std::to_string(table.columns.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path));
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) fail(ErrorCode::IoError, path + " has no header row");
  return table;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::string& path) { return fnv1a64(read_file(path)); }

namespace {

std::string hex16(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& meta,
                    const std::vector<std::string>& artifact_names) {
  const std::string dir = dir_of(path);
  std::ostringstream out;
  out << "manifest_version=1\n";
  for (const auto& [key, value] : meta) out << key << '=' << value << '\n';
  for (std::size_t i = 0; i < artifact_names.size(); ++i) {
    const std::string content = read_file(dir + "/" + artifact_names[i]);
    out << "artifact." << i << ".path=" << artifact_names[i] << '\n';
    out << "artifact." << i << ".fnv1a64=" << hex16(fnv1a64(content)) << '\n';
    out << "artifact." << i << ".bytes=" << content.size() << '\n';
  }
  atomic_write(path, out.str());
}

ManifestCheck check_manifest(const std::string& path) {
  const std::string dir = dir_of(path);
  std::map<std::string, std::string> entries;
  for (const std::string& line : split(read_file(path), '\n')) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::IoError, path + " has a malformed line '" + line + "'");
    }
    entries[line.substr(0, eq)] = line.substr(eq + 1);
  }

  ManifestCheck report;
  for (std::size_t i = 0;; ++i) {
    const std::string prefix = "artifact." + std::to_string(i) + ".";
    const auto name_it = entries.find(prefix + "path");
    if (name_it == entries.end()) break;
    const std::string& name = name_it->second;
    const auto hash_it = entries.find(prefix + "fnv1a64");
    const auto bytes_it = entries.find(prefix + "bytes");
    if (hash_it == entries.end() || bytes_it == entries.end()) {
      report.ok = false;
      report.problems.push_back(name + ": incomplete manifest entry");
      continue;
    }
    std::string content;
    try {
      content = read_file(dir + "/" + name);
    } catch (const Error&) {
      report.ok = false;
      report.problems.push_back(name + ": missing");
      continue;
    }
    if (std::to_string(content.size()) != bytes_it->second) {
      report.ok = false;
      report.problems.push_back(name + ": size " + std::to_string(content.size()) +
                                ", manifest says " + bytes_it->second);
      continue;
    }
    if (hex16(fnv1a64(content)) != hash_it->second) {
      report.ok = false;
      report.problems.push_back(name + ": checksum mismatch");
    }
  }
  return report;
}

}  // namespace fdlab
