#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "qpat/error.hpp"
#include "qpat/io.hpp"

using namespace qpat;

namespace
{
fs::path scratch(std::string const& name)
{
    fs::path dir = fs::temp_directory_path() / "qpat_test_io";
    fs::create_directories(dir);
    return dir / name;
}
}  // namespace

TEST_CASE("fnv1a reference values")
{
    CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);
    CHECK(hash_hex(0xabcULL) == "0000000000000abc");
}

TEST_CASE("raw files are little-endian f64 and round trip bit-exactly")
{
    std::vector<double> v = {1.0, -0.0, 3.14159, 1e-310, std::nan(""), INFINITY, 0x1.fffffffffffffp+1023};
    auto p = scratch("raw.bin");
    write_raw(p, v);
    CHECK(fs::file_size(p) == 8 * v.size());

    std::ifstream in(p, std::ios::binary);
    unsigned char first[8];
    in.read(reinterpret_cast<char*>(first), 8);
    // 1.0 = 0x3ff0000000000000
    CHECK(first[7] == 0x3f);
    CHECK(first[6] == 0xf0);
    CHECK(first[0] == 0x00);

    auto back = read_raw(p, v.size());
    CHECK(std::memcmp(back.data(), v.data(), 8 * v.size()) == 0);
    CHECK_THROWS_AS(read_raw(p, v.size() + 1), IoError);
    CHECK_THROWS_AS(read_raw(scratch("missing.bin"), 1), IoError);
}

TEST_CASE("field files carry geometry and hash")
{
    GridGeometry g{3, 4, 5, 0.25, {-1, -0.5, 0}};
    GridField3 f = sample_field(g, [](Vec3 const& p) { return std::sin(p.x) + p.y * p.z; });
    auto p = scratch("field.bin");
    write_field(p, f, "dimensionless", {{"note", "x"}});
    auto side = read_json(sidecar_path(p));
    CHECK(side.at("dims") == nlohmann::json::array({3, 4, 5}));
    CHECK(side.at("spacing").get<double>() == 0.25);
    CHECK(side.at("units") == "dimensionless");
    CHECK(side.at("note") == "x");

    GridField3 back = read_field(p);
    CHECK(back.geometry() == g);
    CHECK(back.values() == f.values());

    // flip one byte: the hash must catch it
    {
        std::fstream io(p, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(17);
        io.put('\x7f');
    }
    CHECK_THROWS_AS(read_field(p), IoError);
}

TEST_CASE("measurement files round trip")
{
    MeasurementSet m;
    m.detectors = DetectorSet::fibonacci(2, 3.0);
    m.times = {1.0, 1.5, 2.0};
    m.planes = PlaneFamily{HemisphereSampling::product(2, 4), symmetric_offsets(1.2, 3)};
    m.values.resize(2 * 3 * 8 * 3);
    for (std::size_t i = 0; i < m.values.size(); ++i)
    {
        m.values[i] = std::sqrt(double(i)) / 7;
    }
    auto p = scratch("meas.bin");
    write_measurements(p, m, "00000000deadbeef");
    auto back = read_measurements(p);
    CHECK(back.scene_hash == "00000000deadbeef");
    CHECK(back.set.values == m.values);
    CHECK(back.set.times == m.times);
    CHECK(back.set.planes.offsets == m.planes.offsets);
    CHECK(back.set.planes.sampling.weights == m.planes.sampling.weights);
    for (std::size_t i = 0; i < 2; ++i)
    {
        CHECK(back.set.detectors.points[i] == m.detectors.points[i]);
    }
}

TEST_CASE("slice images")
{
    GridGeometry g = GridGeometry::cube(1.0, 9);
    auto constant = extract_slice(GridField3(g, 2.5), 2, 4);
    for (auto px : constant.pixels)
    {
        CHECK(px == 255);
    }
    auto zero = extract_slice(GridField3(g, 0.0), 0, 0);
    for (auto px : zero.pixels)
    {
        CHECK(px == 0);
    }

    Bump b{{0, 0, 0}, 0.9, 1.0};
    GridField3 bump = sample_field(g, [&](Vec3 const& p) { return b.value(p); });
    auto img = extract_slice(bump, 2, 4);
    CHECK(img.width == 9);
    CHECK(img.height == 9);
    auto px = [&](int u, int v) { return int(img.pixels[v * 9 + u]); };
    CHECK(px(4, 4) == 255);
    for (int v = 0; v < 9; ++v)
    {
        for (int u = 0; u < 9; ++u)
        {
            CHECK(px(u, v) <= px(4, 4));
            CHECK(px(u, v) == px(8 - u, v));
            CHECK(px(u, v) == px(v, u));
        }
    }
    CHECK_THROWS_AS(extract_slice(bump, 3, 0), PreconditionError);
    CHECK_THROWS_AS(extract_slice(bump, 1, 9), PreconditionError);

    auto p = scratch("slice.png");
    export_slice(p, bump, 2, 4);
    std::ifstream in(p, std::ios::binary);
    char sig[8];
    in.read(sig, 8);
    CHECK(std::memcmp(sig, "\x89PNG\r\n\x1a\n", 8) == 0);
    auto side = read_json(sidecar_path(p));
    CHECK(side.at("colorbar")[1].get<double>() == img.max);
}
