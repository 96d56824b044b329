#include "shocklab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "shocklab/error.hpp"

namespace shocklab {

nlohmann::json grid_metadata(const Grid& grid) {
  return {{"half_width", grid.half_width()},
          {"n_xi", grid.n_xi()},
          {"n_dims", grid.n_dims()},
          {"n_t", grid.n_t()},
          {"h_xi", grid.h_xi()},
          {"h_t", grid.h_t()},
          {"layout", "row-major, xi fastest"},
          {"dtype", "float64 little-endian"}};
}

Grid grid_from_metadata(const nlohmann::json& meta) {
  try {
    return Grid(meta.at("half_width").get<double>(), meta.at("n_xi").get<int>(), meta.at("n_dims").get<int>(),
                meta.at("n_t").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad grid metadata: ") + e.what());
  }
}

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int k = 0; k < 8; ++k) r |= ((v >> (8 * k)) & 0xffu) << (8 * (7 - k));
    return r;
  }
  return v;
}

}  // namespace

void write_snapshot(const Field& f, const std::filesystem::path& stem, const nlohmann::json& extra) {
  const auto bin = std::filesystem::path(stem.string() + ".bin");
  const auto side = std::filesystem::path(stem.string() + ".json");
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw IoError("cannot open " + bin.string());
  for (double v : f.data()) {
    const std::uint64_t w = to_little(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&w), sizeof w);
  }
  if (!out) throw IoError("write failed for " + bin.string());

  nlohmann::json meta = extra.is_object() ? extra : nlohmann::json::object();
  meta["grid"] = grid_metadata(f.grid());
  meta["file"] = bin.filename().string();
  std::ofstream js(side);
  if (!js) throw IoError("cannot open " + side.string());
  js << std::setw(2) << meta << '\n';
}

Snapshot read_snapshot(const std::filesystem::path& stem) {
  const auto side = std::filesystem::path(stem.string() + ".json");
  const auto bin = std::filesystem::path(stem.string() + ".bin");
  std::ifstream js(side);
  if (!js) throw IoError("missing snapshot sidecar " + side.string());
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt snapshot sidecar " + side.string() + ": " + e.what());
  }
  const Grid grid = grid_from_metadata(meta.at("grid"));
  std::ifstream in(bin, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("missing snapshot data " + bin.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != grid.size() * sizeof(double)) throw IoError("snapshot size does not match grid: " + bin.string());
  in.seekg(0);
  std::vector<double> v(grid.size());
  for (double& x : v) {
    std::uint64_t w = 0;
    in.read(reinterpret_cast<char*>(&w), sizeof w);
    x = std::bit_cast<double>(to_little(w));
  }
  if (!in) throw IoError("short read in " + bin.string());
  try {
    return Snapshot{Field(grid, std::move(v)), meta};
  } catch (const Error& e) {
    throw IoError(std::string("invalid snapshot contents: ") + e.what());
  }
}

void write_slice_csv(const Field& f, const std::filesystem::path& path) {
  const Grid& g = f.grid();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << "xi,x2,u\n" << std::setprecision(17);
  for (int j = 0; j < g.n_t(); ++j) {
    const auto row = static_cast<std::size_t>(j);  // first torus direction: row index j
    for (std::size_t i = 0; i < static_cast<std::size_t>(g.n_xi()); ++i)
      out << g.xi(i) << ',' << g.torus_coord(row, 0) << ',' << f(i, row) << '\n';
  }
}

}  // namespace shocklab
