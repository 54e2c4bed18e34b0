#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qpat/config.hpp"
#include "qpat/reconstruction.hpp"

namespace qpat
{
namespace fs = std::filesystem;

struct SynthesisOutput
{
    fs::path measurements;  //!< raw file; sidecar at "<path>.json"
    fs::path config;        //!< resolved config written next to it
};

//! Synthesize the configured MeasurementSet into out_dir/measurements.bin.
SynthesisOutput cmd_synthesize(RunConfig const& cfg, fs::path const& out_dir);

/*!
 * Run the configured pipeline and write alpha1_eps.bin, f.bin, rho1_eps.bin
 * and diagnostics.json into out_dir. The numeric path reads `input`
 * (default out_dir/measurements.bin) and requires its scene hash to match the
 * config.
 */
ReconResult cmd_reconstruct(RunConfig const& cfg,
                            fs::path const& out_dir,
                            std::optional<fs::path> const& input = std::nullopt);

struct VerifyCheck
{
    std::string name;
    bool passed{false};
    double value{0};
    double tolerance{0};
    std::string detail;
};

//! Oracle comparisons for the kernel, the transforms and the limits; the
//! report is also written to out_dir/verify.json when out_dir is non-empty.
std::vector<VerifyCheck> cmd_verify(RunConfig const& cfg, fs::path const& out_dir = {});

//! One PNG per index: out_dir/<stem>_<axis letter><index>.png.
std::vector<fs::path> cmd_export_slices(fs::path const& field_path,
                                        int axis,
                                        std::vector<int> const& indices,
                                        fs::path const& out_dir);

}  // namespace qpat
