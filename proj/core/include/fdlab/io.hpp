#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fdlab/params.hpp"
#include "fdlab/profile.hpp"

namespace fdlab {

// Doubles print with %.17g everywhere, so a value round-trips exactly and
// identical runs produce byte-identical files.
std::string g17(double value);

// Write content to path via a temporary file and rename, so readers never see
// a partial file.  Throws IoError.
void atomic_write(const std::string& path, const std::string& content);

// Snapshot file: '# key=value' metadata (variant, dim, lambda, q, mass,
// radius, cells, plus caller extras), a column header, then one
// 'r,density[,mode1]' row per cell.
void write_snapshot(const std::string& path, const Profile& u, const ModelParams& p,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

struct SnapshotData {
  Profile profile;
  ModelParams params;
  std::map<std::string, std::string> meta;
};

SnapshotData read_snapshot(const std::string& path);

// Plain CSV with a header row; used for time series and one-line reports.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const;  // throws IoError
};

Table read_csv(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);

// Manifest: 'key=value' lines echoing the run parameters, then for each
// artifact the triple artifact.N.path / artifact.N.fnv1a64 / artifact.N.bytes.
// Paths are stored relative to the manifest's directory.
void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& meta,
                    const std::vector<std::string>& artifact_names);

struct ManifestCheck {
  bool ok = true;
  std::vector<std::string> problems;
};

ManifestCheck check_manifest(const std::string& path);

}  // namespace fdlab
