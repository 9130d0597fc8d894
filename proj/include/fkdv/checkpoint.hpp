#pragma once

#include <filesystem>
#include <string>

#include "fkdv/forcing.hpp"
#include "fkdv/grid.hpp"

namespace fkdv {

struct SnapshotMeta {
  double half_length = 0.0;
  std::size_t num_points = 0;
  double t = 0.0;
  double epsilon = 0.0;
  double energy = 0.0;
  std::string profile;
};

// Writes <base>.bin (little-endian float64 samples) and <base>.json.
void write_snapshot(const std::filesystem::path& base, const Field& u, double t, const ForcingSpec& forcing);

struct Snapshot {
  Field field;
  SnapshotMeta meta;
};
// Throws std::runtime_error on missing files or a size mismatch.
Snapshot read_snapshot(const std::filesystem::path& base);

}  // namespace fkdv
