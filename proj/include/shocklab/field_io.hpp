#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "shocklab/grid.hpp"

namespace shocklab {

nlohmann::json grid_metadata(const Grid& grid);
Grid grid_from_metadata(const nlohmann::json& meta);

/// Writes <stem>.bin (little-endian float64, xi fastest) and <stem>.json (grid metadata
/// plus `extra`, e.g. time and shift).
void write_snapshot(const Field& f, const std::filesystem::path& stem, const nlohmann::json& extra = {});

struct Snapshot {
  Field field;
  nlohmann::json meta;
};

/// Reads a snapshot written by write_snapshot; throws IoError on size or metadata mismatch.
Snapshot read_snapshot(const std::filesystem::path& stem);

/// CSV "xi,x2,u" of a two-dimensional field (first torus direction only).
void write_slice_csv(const Field& f, const std::filesystem::path& path);

}  // namespace shocklab
