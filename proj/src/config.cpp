#include "qpat/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "qpat/error.hpp"
#include "qpat/io.hpp"

namespace qpat
{
using nlohmann::json;

std::string to_string(PipelinePath p)
{
    return p == PipelinePath::analytic ? "analytic" : "numeric";
}

PipelinePath parse_pipeline_path(std::string const& s)
{
    if (s == "analytic")
    {
        return PipelinePath::analytic;
    }
    if (s == "numeric")
    {
        return PipelinePath::numeric;
    }
    throw ConfigError("pipeline path must be \"analytic\" or \"numeric\", got \"" + s + "\"");
}

//---------------------------------------------------------------------------//
// Derived objects
//---------------------------------------------------------------------------//

DetectorSet RunConfig::detectors() const
{
    return DetectorSet::fibonacci(sampling.n_detectors, scene.sigma_radius);
}

std::vector<double> RunConfig::times() const
{
    return uniform_times(sampling.times.t_min, sampling.times.t_max, sampling.times.count);
}

PlaneFamily RunConfig::planes() const
{
    auto const& p = sampling.planes;
    double hw = p.offset_half_width.value_or(scene.omega_radius);
    return PlaneFamily{HemisphereSampling::product(p.n_polar, p.n_azimuth), symmetric_offsets(hw, p.n_offsets)};
}

GridGeometry RunConfig::lattice() const
{
    return GridGeometry::cube(sampling.lattice_half_width, sampling.lattice_nodes);
}

PipelineSpec RunConfig::pipeline_spec() const
{
    PipelineSpec spec;
    spec.lattice = lattice();
    spec.xray = xray;
    spec.recover = recover;
    spec.prior_pad = prior_pad;
    spec.analytic = limits.analytic;
    return spec;
}

NumericLimitSpec RunConfig::numeric_limit_spec() const
{
    NumericLimitSpec spec;
    if (limits.large_t_start)
    {
        spec.large_t_start = *limits.large_t_start;
    }
    else
    {
        double bound = 0;
        for (auto const& x : detectors().points)
        {
            bound = std::max(bound, max_support_bound(scene, x));
        }
        spec.large_t_start = bound;
    }
    spec.min_large_t_samples = limits.min_large_t_samples;
    spec.mask_fraction = limits.mask_fraction;
    spec.wavefront_steps = limits.wavefront_steps;
    return spec;
}

OracleConfig RunConfig::oracle_config() const
{
    OracleConfig cfg;
    cfg.sample_count = oracle_samples;
    cfg.rng_seed = seed;
    return cfg;
}

//---------------------------------------------------------------------------//
// Serialization
//---------------------------------------------------------------------------//

namespace
{
json vec_json(Vec3 const& v) { return json::array({v.x, v.y, v.z}); }

json field_json(AnalyticField const& field)
{
    json out = json::array();
    for (auto const& b : field.bumps())
    {
        out.push_back({{"center", vec_json(b.center)}, {"radius", b.radius}, {"amplitude", b.amplitude}});
    }
    return out;
}

json quad_json(QuadSpec const& q)
{
    return {{"n_sum", q.n_sum}, {"n_diff", q.n_diff}, {"n_phi", q.n_phi}};
}

json ray_json(RayQuadSpec const& q)
{
    return {{"n_radial", q.n_radial}, {"n_polar", q.n_polar}, {"n_azimuth", q.n_azimuth}};
}

}  // namespace

json scene_to_json(Scene const& scene)
{
    return {{"f", field_json(scene.f)},
            {"alpha1", field_json(scene.alpha1)},
            {"rho1", field_json(scene.rho1)},
            {"epsilon", scene.epsilon},
            {"omega_radius", scene.omega_radius},
            {"sigma_radius", scene.sigma_radius}};
}

json to_json(RunConfig const& cfg)
{
    auto const& s = cfg.sampling;
    json planes = {{"n_polar", s.planes.n_polar}, {"n_azimuth", s.planes.n_azimuth}, {"n_offsets", s.planes.n_offsets}};
    if (s.planes.offset_half_width)
    {
        planes["offset_half_width"] = *s.planes.offset_half_width;
    }
    auto const& syn = s.synthesis;
    json synthesis = {{"mode", syn.mode == SynthesisMode::cached ? "cached" : "direct"},
                      {"kernel", quad_json(syn.kernel)},
                      {"profile",
                       {{"box", quad_json(syn.profile.box)},
                        {"panel_nodes", syn.profile.panel_nodes},
                        {"max_panel_width", syn.profile.max_panel_width},
                        {"duffy_reach", syn.profile.duffy_reach}}},
                      {"cache_nodes", syn.cache_nodes},
                      {"plane_radial", syn.plane_radial},
                      {"plane_angular", syn.plane_angular},
                      {"support_margin", syn.support_margin}};
    json sampling = {{"n_detectors", s.n_detectors},
                     {"times", {{"t_min", s.times.t_min}, {"t_max", s.times.t_max}, {"count", s.times.count}}},
                     {"planes", planes},
                     {"synthesis", synthesis},
                     {"lattice", {{"half_width", s.lattice_half_width}, {"nodes", s.lattice_nodes}}}};
    json limits = {{"analytic_nodes", cfg.limits.analytic.n_nodes},
                   {"whole_space", ray_json(cfg.limits.analytic.whole_space)},
                   {"mask_fraction", cfg.limits.mask_fraction},
                   {"min_large_t_samples", cfg.limits.min_large_t_samples},
                   {"wavefront_steps", cfg.limits.wavefront_steps}};
    if (cfg.limits.large_t_start)
    {
        limits["large_t_start"] = *cfg.limits.large_t_start;
    }
    json xray = {{"n_angles", cfg.xray.n_angles},
                 {"n_offsets", cfg.xray.n_offsets},
                 {"n_candidates", cfg.xray.n_candidates},
                 {"f_floor_fraction", cfg.xray.f_floor_fraction},
                 {"max_missing", cfg.xray.max_missing}};
    json detector = {{"n_candidates", cfg.recover.detector.n_candidates}};
    if (cfg.recover.detector.fixed)
    {
        detector["fixed"] = vec_json(*cfg.recover.detector.fixed);
    }
    json recover = {{"detector", detector},
                    {"min_denominator", cfg.recover.min_denominator},
                    {"rho_floor_fraction", cfg.recover.rho_floor_fraction},
                    {"panel_cells", cfg.recover.panel_cells}};
    return {{"scene", scene_to_json(cfg.scene)},
            {"sampling", sampling},
            {"limits", limits},
            {"xray", xray},
            {"recover", recover},
            {"prior_pad", cfg.prior_pad},
            {"path", to_string(cfg.path)},
            {"output", cfg.output},
            {"seed", cfg.seed},
            {"oracle_samples", cfg.oracle_samples}};
}

//---------------------------------------------------------------------------//
// Validation
//---------------------------------------------------------------------------//

namespace
{
[[noreturn]] void fail(std::string const& ptr, std::string const& msg)
{
    throw ConfigError("config " + (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

std::string describe(json const& j)
{
    std::string s = j.dump();
    return s.size() > 40 ? s.substr(0, 37) + "..." : s;
}

// Walks one object, hands out typed members and rejects unknown keys.
class Reader
{
  public:
    Reader(json const* node, std::string ptr) : node_(node), ptr_(std::move(ptr))
    {
        if (node_ && !node_->is_object())
        {
            fail(ptr_, "expected an object, got " + describe(*node_));
        }
    }

    ~Reader() noexcept(false)
    {
        if (std::uncaught_exceptions() == 0)
        {
            finish();
        }
    }

    json const* find(std::string const& key)
    {
        seen_.insert(key);
        if (!node_)
        {
            return nullptr;
        }
        auto it = node_->find(key);
        return it == node_->end() ? nullptr : &*it;
    }

    std::string at(std::string const& key) const { return ptr_ + "/" + key; }

    Reader child(std::string const& key) { return Reader(find(key), at(key)); }

    double number(std::string const& key, double def)
    {
        json const* j = find(key);
        if (!j)
        {
            return def;
        }
        if (!j->is_number())
        {
            fail(at(key), "expected a number, got " + describe(*j));
        }
        return j->get<double>();
    }

    double positive(std::string const& key, double def)
    {
        double v = number(key, def);
        if (!(v > 0))
        {
            fail(at(key), "must be positive, got " + json(v).dump());
        }
        return v;
    }

    double fraction(std::string const& key, double def)
    {
        double v = number(key, def);
        if (!(v > 0 && v < 1))
        {
            fail(at(key), "must lie in (0, 1), got " + json(v).dump());
        }
        return v;
    }

    std::optional<double> optional_positive(std::string const& key, std::optional<double> def)
    {
        if (!find(key))
        {
            return def;
        }
        return positive(key, 0);
    }

    long long integer(std::string const& key, long long def, long long min)
    {
        json const* j = find(key);
        long long v = def;
        if (j)
        {
            if (!j->is_number_integer())
            {
                fail(at(key), "expected an integer, got " + describe(*j));
            }
            v = j->get<long long>();
        }
        if (v < min)
        {
            fail(at(key), "must be at least " + std::to_string(min) + ", got " + std::to_string(v));
        }
        return v;
    }

    int count(std::string const& key, int def, int min = 1) { return static_cast<int>(integer(key, def, min)); }

    std::string string(std::string const& key, std::string const& def)
    {
        json const* j = find(key);
        if (!j)
        {
            return def;
        }
        if (!j->is_string())
        {
            fail(at(key), "expected a string, got " + describe(*j));
        }
        return j->get<std::string>();
    }

    std::string const& pointer() const { return ptr_; }

  private:
    void finish() const
    {
        if (!node_)
        {
            return;
        }
        for (auto it = node_->begin(); it != node_->end(); ++it)
        {
            if (!seen_.count(it.key()))
            {
                fail(ptr_ + "/" + it.key(), "unknown key");
            }
        }
    }

    json const* node_;
    std::string ptr_;
    std::set<std::string> seen_;
};

Vec3 read_vec(json const& j, std::string const& ptr)
{
    if (!j.is_array() || j.size() != 3 || !std::all_of(j.begin(), j.end(), [](json const& e) { return e.is_number(); }))
    {
        fail(ptr, "expected an array of 3 numbers, got " + describe(j));
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

AnalyticField read_field(json const* j, std::string const& ptr, AnalyticField const& def)
{
    if (!j)
    {
        return def;
    }
    if (!j->is_array())
    {
        fail(ptr, "expected an array of bumps, got " + describe(*j));
    }
    std::vector<Bump> bumps;
    for (std::size_t i = 0; i < j->size(); ++i)
    {
        std::string p = ptr + "/" + std::to_string(i);
        Reader r(&(*j)[i], p);
        json const* c = r.find("center");
        if (!c)
        {
            fail(p + "/center", "required");
        }
        Bump b;
        b.center = read_vec(*c, p + "/center");
        b.radius = r.positive("radius", 1.0);
        b.amplitude = r.number("amplitude", 1.0);
        bumps.push_back(b);
    }
    return AnalyticField(std::move(bumps));
}

QuadSpec read_quad(Reader r, QuadSpec const& def)
{
    QuadSpec q;
    q.n_sum = r.count("n_sum", def.n_sum, 2);
    q.n_diff = r.count("n_diff", def.n_diff, 2);
    q.n_phi = r.count("n_phi", def.n_phi, 2);
    return q;
}

RayQuadSpec read_ray(Reader r, RayQuadSpec const& def)
{
    RayQuadSpec q;
    q.n_radial = r.count("n_radial", def.n_radial, 2);
    q.n_polar = r.count("n_polar", def.n_polar, 2);
    q.n_azimuth = r.count("n_azimuth", def.n_azimuth, 2);
    return q;
}

Scene read_scene(Reader r)
{
    Scene def = Scene::default_scene();
    Scene s;
    s.f = read_field(r.find("f"), r.at("f"), def.f);
    s.alpha1 = read_field(r.find("alpha1"), r.at("alpha1"), def.alpha1);
    s.rho1 = read_field(r.find("rho1"), r.at("rho1"), def.rho1);
    s.epsilon = r.number("epsilon", def.epsilon);
    if (s.epsilon < 0)
    {
        fail(r.at("epsilon"), "must be non-negative");
    }
    s.omega_radius = r.positive("omega_radius", def.omega_radius);
    s.sigma_radius = r.positive("sigma_radius", def.sigma_radius);
    try
    {
        s.validate();
    }
    catch (PreconditionError const& e)
    {
        fail(r.pointer(), e.what());
    }
    return s;
}

}  // namespace

RunConfig config_from_json(json const& doc)
{
    RunConfig cfg;
    RunConfig const def;
    Reader root(&doc, "");

    cfg.scene = read_scene(root.child("scene"));

    {
        Reader s = root.child("sampling");
        auto& out = cfg.sampling;
        out.n_detectors = s.count("n_detectors", def.sampling.n_detectors);
        {
            Reader t = s.child("times");
            out.times.t_min = t.number("t_min", def.sampling.times.t_min);
            out.times.t_max = t.positive("t_max", def.sampling.times.t_max);
            out.times.count = t.count("count", def.sampling.times.count, 2);
            if (out.times.t_min < 0)
            {
                fail(t.at("t_min"), "must be non-negative");
            }
            if (!(out.times.t_max > out.times.t_min))
            {
                fail(t.at("t_max"), "must exceed t_min");
            }
        }
        {
            Reader p = s.child("planes");
            out.planes.n_polar = p.count("n_polar", def.sampling.planes.n_polar);
            out.planes.n_azimuth = p.count("n_azimuth", def.sampling.planes.n_azimuth);
            out.planes.n_offsets = p.count("n_offsets", def.sampling.planes.n_offsets, 2);
            out.planes.offset_half_width = p.optional_positive("offset_half_width", std::nullopt);
        }
        {
            Reader y = s.child("synthesis");
            auto const& d = def.sampling.synthesis;
            auto& o = out.synthesis;
            std::string mode = y.string("mode", "cached");
            if (mode == "cached")
            {
                o.mode = SynthesisMode::cached;
            }
            else if (mode == "direct")
            {
                o.mode = SynthesisMode::direct;
            }
            else
            {
                fail(y.at("mode"), "must be \"cached\" or \"direct\", got \"" + mode + "\"");
            }
            o.kernel = read_quad(y.child("kernel"), d.kernel);
            {
                Reader pr = y.child("profile");
                o.profile.box = read_quad(pr.child("box"), d.profile.box);
                o.profile.panel_nodes = pr.count("panel_nodes", d.profile.panel_nodes, 2);
                o.profile.max_panel_width = pr.positive("max_panel_width", d.profile.max_panel_width);
                o.profile.duffy_reach = pr.positive("duffy_reach", d.profile.duffy_reach);
            }
            o.cache_nodes = y.count("cache_nodes", d.cache_nodes, 2);
            o.plane_radial = y.count("plane_radial", d.plane_radial, 2);
            o.plane_angular = y.count("plane_angular", d.plane_angular, 2);
            o.support_margin = y.number("support_margin", d.support_margin);
            if (o.support_margin < 0)
            {
                fail(y.at("support_margin"), "must be non-negative");
            }
        }
        {
            Reader l = s.child("lattice");
            out.lattice_half_width = l.positive("half_width", def.sampling.lattice_half_width);
            out.lattice_nodes = l.count("nodes", def.sampling.lattice_nodes, 2);
        }
    }

    {
        Reader l = root.child("limits");
        cfg.limits.analytic.n_nodes = l.count("analytic_nodes", def.limits.analytic.n_nodes, 2);
        cfg.limits.analytic.whole_space = read_ray(l.child("whole_space"), def.limits.analytic.whole_space);
        cfg.limits.mask_fraction = l.fraction("mask_fraction", def.limits.mask_fraction);
        cfg.limits.large_t_start = l.optional_positive("large_t_start", std::nullopt);
        cfg.limits.min_large_t_samples = l.count("min_large_t_samples", def.limits.min_large_t_samples, 3);
        if (json const* w = l.find("wavefront_steps"))
        {
            std::string p = l.at("wavefront_steps");
            if (!w->is_array() || w->size() != 3)
            {
                fail(p, "expected an array of 3 integers, got " + describe(*w));
            }
            std::vector<int> steps;
            for (auto const& e : *w)
            {
                if (!e.is_number_integer() || e.get<long long>() < 1)
                {
                    fail(p, "entries must be positive integers, got " + describe(e));
                }
                steps.push_back(e.get<int>());
            }
            if (!std::is_sorted(steps.begin(), steps.end()) || steps[0] == steps[1] || steps[1] == steps[2])
            {
                fail(p, "entries must be strictly increasing");
            }
            cfg.limits.wavefront_steps = steps;
        }
    }

    {
        Reader x = root.child("xray");
        cfg.xray.n_angles = x.count("n_angles", def.xray.n_angles);
        cfg.xray.n_offsets = x.count("n_offsets", def.xray.n_offsets, 2);
        cfg.xray.n_candidates = x.count("n_candidates", def.xray.n_candidates, 2);
        cfg.xray.f_floor_fraction = x.fraction("f_floor_fraction", def.xray.f_floor_fraction);
        cfg.xray.max_missing = x.fraction("max_missing", def.xray.max_missing);
    }

    {
        Reader r = root.child("recover");
        {
            Reader d = r.child("detector");
            cfg.recover.detector.n_candidates = d.count("n_candidates", def.recover.detector.n_candidates);
            if (json const* f = d.find("fixed"))
            {
                Vec3 p = read_vec(*f, d.at("fixed"));
                if (std::abs(norm(p) - cfg.scene.sigma_radius) > 1e-9 * cfg.scene.sigma_radius)
                {
                    fail(d.at("fixed"), "must lie on the detector sphere of radius "
                                            + json(cfg.scene.sigma_radius).dump());
                }
                cfg.recover.detector.fixed = p;
            }
        }
        cfg.recover.min_denominator = r.positive("min_denominator", def.recover.min_denominator);
        cfg.recover.rho_floor_fraction = r.fraction("rho_floor_fraction", def.recover.rho_floor_fraction);
        cfg.recover.panel_cells = r.positive("panel_cells", def.recover.panel_cells);
    }

    cfg.prior_pad = root.number("prior_pad", def.prior_pad);
    if (cfg.prior_pad < 0)
    {
        fail("/prior_pad", "must be non-negative");
    }
    std::string path = root.string("path", to_string(def.path));
    try
    {
        cfg.path = parse_pipeline_path(path);
    }
    catch (ConfigError const& e)
    {
        fail("/path", e.what());
    }
    cfg.output = root.string("output", def.output);
    if (cfg.output.empty())
    {
        fail("/output", "must not be empty");
    }
    {
        json const* s = root.find("seed");
        if (s)
        {
            if (!s->is_number_unsigned())
            {
                fail("/seed", "expected a non-negative integer, got " + describe(*s));
            }
            cfg.seed = s->get<std::uint64_t>();
        }
    }
    cfg.oracle_samples = static_cast<std::size_t>(root.integer("oracle_samples", def.oracle_samples, 10000));
    return cfg;
}

RunConfig parse_config(std::string const& text, std::string const& origin)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (json::parse_error const& e)
    {
        // locate the failing byte as line:column
        std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < byte; ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
            {
                ++col;
            }
        }
        std::string what = e.what();
        auto pos = what.find("syntax error");
        throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": "
                          + (pos == std::string::npos ? what : what.substr(pos)));
    }
    return config_from_json(doc);
}

RunConfig load_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw IoError("cannot open config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

void save_config(std::filesystem::path const& path, RunConfig const& cfg)
{
    write_json(path, to_json(cfg));
}

std::string scene_hash(Scene const& scene)
{
    std::string canon = scene_to_json(scene).dump();
    return hash_hex(fnv1a64(canon.data(), canon.size()));
}

}  // namespace qpat
