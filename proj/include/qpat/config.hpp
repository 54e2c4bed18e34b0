#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qpat/forward_model.hpp"
#include "qpat/limits.hpp"
#include "qpat/oracle.hpp"
#include "qpat/phantom.hpp"
#include "qpat/reconstruction.hpp"

namespace qpat
{
enum class PipelinePath
{
    analytic,
    numeric
};

std::string to_string(PipelinePath p);
PipelinePath parse_pipeline_path(std::string const& s);

struct TimeGrid
{
    double t_min{0.1};
    double t_max{8.4};  // 2 (sigma + omega) for the default scene
    int count{96};
};

struct PlaneGrid
{
    int n_polar{16};
    int n_azimuth{32};
    int n_offsets{97};
    std::optional<double> offset_half_width;  //!< defaults to omega_radius
};

struct SamplingConfig
{
    int n_detectors{64};
    TimeGrid times{};
    PlaneGrid planes{};
    SynthesisSpec synthesis{};
    double lattice_half_width{1.0};
    int lattice_nodes{48};
};

struct LimitConfig
{
    AnalyticLimitSpec analytic{};
    double mask_fraction{0.01};
    std::optional<double> large_t_start;  //!< defaults to the largest support bound
    int min_large_t_samples{6};
    std::vector<int> wavefront_steps{3, 5, 9};
};

struct RunConfig
{
    Scene scene{Scene::default_scene()};
    SamplingConfig sampling{};
    LimitConfig limits{};
    XraySpec xray{};
    RecoverSpec recover{};
    double prior_pad{0.05};
    PipelinePath path{PipelinePath::analytic};
    std::string output{"qpat_out"};
    std::uint64_t seed{20240917};
    std::size_t oracle_samples{1000000};

    //! Derived sampling objects.
    DetectorSet detectors() const;
    std::vector<double> times() const;
    PlaneFamily planes() const;
    GridGeometry lattice() const;
    PipelineSpec pipeline_spec() const;
    NumericLimitSpec numeric_limit_spec() const;
    OracleConfig oracle_config() const;
};

//! Full tree with every default written out.
nlohmann::json to_json(RunConfig const& cfg);
nlohmann::json scene_to_json(Scene const& scene);

/*!
 * Validate and convert a config tree. Missing keys take their defaults,
 * unknown keys are rejected. Errors are ConfigError carrying the JSON pointer
 * of the offending field.
 */
RunConfig config_from_json(nlohmann::json const& doc);

//! Parse config text; syntax errors report line:column.
RunConfig parse_config(std::string const& text, std::string const& origin = "<config>");
RunConfig load_config(std::filesystem::path const& path);
void save_config(std::filesystem::path const& path, RunConfig const& cfg);

//! FNV-1a of the canonical scene serialization.
std::string scene_hash(Scene const& scene);

}  // namespace qpat
