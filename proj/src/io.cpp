#include "qpat/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <png.h>

#include "qpat/error.hpp"

namespace qpat
{
using nlohmann::json;

namespace
{
static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint64_t swap_bytes(std::uint64_t v)
{
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i)
    {
        out = (out << 8) | ((v >> (8 * i)) & 0xff);
    }
    return out;
}

std::vector<unsigned char> to_le_bytes(std::vector<double> const& values)
{
    std::vector<unsigned char> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        auto bits = std::bit_cast<std::uint64_t>(values[i]);
        if constexpr (std::endian::native == std::endian::big)
        {
            bits = swap_bytes(bits);
        }
        std::memcpy(bytes.data() + 8 * i, &bits, 8);
    }
    return bytes;
}

json vec_json(Vec3 const& v) { return json::array({v.x, v.y, v.z}); }

Vec3 json_vec(json const& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json geometry_json(GridGeometry const& g)
{
    return {{"dims", {g.nx, g.ny, g.nz}}, {"spacing", g.h}, {"origin", vec_json(g.origin)}};
}

GridGeometry json_geometry(json const& j)
{
    auto dims = j.at("dims");
    return GridGeometry{dims.at(0).get<int>(),
                        dims.at(1).get<int>(),
                        dims.at(2).get<int>(),
                        j.at("spacing").get<double>(),
                        json_vec(j.at("origin"))};
}

}  // namespace

std::uint64_t fnv1a64(void const* data, std::size_t size, std::uint64_t seed)
{
    auto const* p = static_cast<unsigned char const*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i)
    {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t hash_values(std::vector<double> const& values)
{
    auto bytes = to_le_bytes(values);
    return fnv1a64(bytes.data(), bytes.size());
}

fs::path sidecar_path(fs::path const& data_path)
{
    return fs::path(data_path.string() + ".json");
}

void write_raw(fs::path const& path, std::vector<double> const& values)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    auto bytes = to_le_bytes(values);
    out.write(reinterpret_cast<char const*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
    {
        throw IoError("failed writing " + path.string());
    }
}

std::vector<double> read_raw(fs::path const& path, std::size_t expected_count)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw IoError("cannot open " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected_count * 8)
    {
        throw IoError(path.string() + ": expected " + std::to_string(expected_count * 8)
                      + " bytes, found " + std::to_string(bytes.size()));
    }
    std::vector<double> values(expected_count);
    for (std::size_t i = 0; i < expected_count; ++i)
    {
        std::uint64_t bits;
        std::memcpy(&bits, bytes.data() + 8 * i, 8);
        if constexpr (std::endian::native == std::endian::big)
        {
            bits = swap_bytes(bits);
        }
        values[i] = std::bit_cast<double>(bits);
    }
    return values;
}

void write_json(fs::path const& path, json const& doc)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out)
    {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out)
    {
        throw IoError("failed writing " + path.string());
    }
}

json read_json(fs::path const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw IoError("cannot open " + path.string());
    }
    try
    {
        return json::parse(in);
    }
    catch (json::parse_error const& e)
    {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_field(fs::path const& path, GridField3 const& field, std::string const& units, json const& extra)
{
    write_raw(path, field.values());
    json side = geometry_json(field.geometry());
    side["format"] = "f64-le-raw";
    side["layout"] = "x-fastest";
    side["units"] = units;
    side["hash"] = hash_hex(hash_values(field.values()));
    side.update(extra);
    write_json(sidecar_path(path), side);
}

GridField3 read_field(fs::path const& path)
{
    json side = read_json(sidecar_path(path));
    try
    {
        GridGeometry g = json_geometry(side);
        g.validate();
        auto values = read_raw(path, g.size());
        if (side.at("hash").get<std::string>() != hash_hex(hash_values(values)))
        {
            throw IoError(path.string() + ": content hash mismatch");
        }
        return GridField3(g, std::move(values));
    }
    catch (json::exception const& e)
    {
        throw IoError(sidecar_path(path).string() + ": malformed sidecar: " + e.what());
    }
    catch (PreconditionError const& e)
    {
        throw IoError(sidecar_path(path).string() + ": " + e.what());
    }
}

void write_measurements(fs::path const& path, MeasurementSet const& m, std::string const& scene_hash)
{
    write_raw(path, m.values);
    json side;
    side["format"] = "f64-le-raw";
    side["layout"] = "values[detector][time][direction][offset]";
    side["detector_radius"] = m.detectors.radius;
    json det = json::array();
    for (auto const& p : m.detectors.points)
    {
        det.push_back(vec_json(p));
    }
    side["detectors"] = det;
    side["times"] = m.times;
    json dirs = json::array();
    for (auto const& d : m.planes.sampling.directions)
    {
        dirs.push_back(vec_json(d));
    }
    side["directions"] = dirs;
    side["direction_weights"] = m.planes.sampling.weights;
    side["offsets"] = m.planes.offsets;
    side["scene_hash"] = scene_hash;
    side["hash"] = hash_hex(hash_values(m.values));
    write_json(sidecar_path(path), side);
}

LoadedMeasurements read_measurements(fs::path const& path)
{
    json side = read_json(sidecar_path(path));
    LoadedMeasurements out;
    try
    {
        auto& m = out.set;
        m.detectors.radius = side.at("detector_radius").get<double>();
        for (auto const& p : side.at("detectors"))
        {
            m.detectors.points.push_back(json_vec(p));
        }
        m.times = side.at("times").get<std::vector<double>>();
        for (auto const& d : side.at("directions"))
        {
            m.planes.sampling.directions.push_back(json_vec(d));
        }
        m.planes.sampling.weights = side.at("direction_weights").get<std::vector<double>>();
        m.planes.offsets = side.at("offsets").get<std::vector<double>>();
        std::size_t count = m.detectors.size() * m.times.size() * m.planes.n_directions()
                            * m.planes.n_offsets();
        m.values = read_raw(path, count);
        if (side.at("hash").get<std::string>() != hash_hex(hash_values(m.values)))
        {
            throw IoError(path.string() + ": content hash mismatch");
        }
        out.scene_hash = side.at("scene_hash").get<std::string>();
    }
    catch (json::exception const& e)
    {
        throw IoError(sidecar_path(path).string() + ": malformed sidecar: " + e.what());
    }
    return out;
}

//---------------------------------------------------------------------------//
// PNG
//---------------------------------------------------------------------------//

SliceImage extract_slice(GridField3 const& field, int axis, int index)
{
    auto const& g = field.geometry();
    int dims[3] = {g.nx, g.ny, g.nz};
    if (axis < 0 || axis > 2)
    {
        throw PreconditionError("slice axis must be 0, 1 or 2");
    }
    if (index < 0 || index >= dims[axis])
    {
        throw PreconditionError("slice index " + std::to_string(index) + " out of range [0, "
                                + std::to_string(dims[axis]) + ")");
    }
    int ua = axis == 0 ? 1 : 0;
    int va = axis == 2 ? 1 : 2;
    SliceImage img;
    img.width = dims[ua];
    img.height = dims[va];
    std::vector<double> vals(static_cast<std::size_t>(img.width) * img.height);
    for (int v = 0; v < img.height; ++v)
    {
        for (int u = 0; u < img.width; ++u)
        {
            int ijk[3];
            ijk[axis] = index;
            ijk[ua] = u;
            ijk[va] = v;
            vals[static_cast<std::size_t>(v) * img.width + u] = field(ijk[0], ijk[1], ijk[2]);
        }
    }
    img.min = *std::min_element(vals.begin(), vals.end());
    img.max = *std::max_element(vals.begin(), vals.end());
    img.pixels.resize(vals.size());
    double span = img.max - img.min;
    for (std::size_t i = 0; i < vals.size(); ++i)
    {
        double s = span > 0 ? (vals[i] - img.min) / span : (img.max > 0 ? 1.0 : 0.0);
        img.pixels[i] = static_cast<std::uint8_t>(std::lround(255 * s));
    }
    return img;
}

void write_png(fs::path const& path, SliceImage const& image)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp)
    {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png)))
    {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("libpng failed writing " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png,
                 info,
                 image.width,
                 image.height,
                 8,
                 PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    // image rows go top-down: flip so the second index increases upward
    for (int r = image.height - 1; r >= 0; --r)
    {
        png_write_row(png, const_cast<png_bytep>(image.pixels.data() + static_cast<std::size_t>(r) * image.width));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

void export_slice(fs::path const& path, GridField3 const& field, int axis, int index)
{
    SliceImage img = extract_slice(field, axis, index);
    write_png(path, img);
    write_json(sidecar_path(path),
               {{"axis", axis}, {"index", index}, {"colorbar", {img.min, img.max}},
                {"width", img.width}, {"height", img.height}});
}

}  // namespace qpat
