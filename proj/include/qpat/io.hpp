#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpat/forward_model.hpp"
#include "qpat/grid.hpp"

namespace qpat
{
namespace fs = std::filesystem;

//! 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(void const* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

//! Hex form used in sidecars.
std::string hash_hex(std::uint64_t h);

//! Hash of the raw little-endian bytes of a value array.
std::uint64_t hash_values(std::vector<double> const& values);

//! Sidecar path for a raw data file: "<path>.json".
fs::path sidecar_path(fs::path const& data_path);

//! Raw little-endian f64 array. Throws IoError.
void write_raw(fs::path const& path, std::vector<double> const& values);
std::vector<double> read_raw(fs::path const& path, std::size_t expected_count);

void write_json(fs::path const& path, nlohmann::json const& doc);
nlohmann::json read_json(fs::path const& path);

/*!
 * Write a field as raw values plus a sidecar with dims, spacing, origin,
 * units and content hash. `extra` is merged into the sidecar.
 */
void write_field(fs::path const& path,
                 GridField3 const& field,
                 std::string const& units = "dimensionless",
                 nlohmann::json const& extra = nlohmann::json::object());

//! Read a field and verify its content hash. Throws IoError.
GridField3 read_field(fs::path const& path);

//! Measurements plus a sidecar with every sampling grid and the scene hash.
void write_measurements(fs::path const& path, MeasurementSet const& m, std::string const& scene_hash);

struct LoadedMeasurements
{
    MeasurementSet set;
    std::string scene_hash;
};
LoadedMeasurements read_measurements(fs::path const& path);

//---------------------------------------------------------------------------//
// PNG slices
//---------------------------------------------------------------------------//

//! Grayscale slice with a linear [min, max] -> [0, 255] map.
struct SliceImage
{
    int width{0};
    int height{0};
    std::vector<std::uint8_t> pixels;  //!< row-major, first row = lowest second index
    double min{0};
    double max{0};
};

//! Slice through index `index` along axis 0 (x), 1 (y) or 2 (z).
SliceImage extract_slice(GridField3 const& field, int axis, int index);

void write_png(fs::path const& path, SliceImage const& image);

//! PNG plus a sidecar with the colorbar limits.
void export_slice(fs::path const& path, GridField3 const& field, int axis, int index);

}  // namespace qpat
