#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qpat/commands.hpp"
#include "qpat/error.hpp"
#include "qpat/io.hpp"
#include "qpat/kernel.hpp"
#include "qpat/oracle.hpp"
#include "qpat/parallel.hpp"
#include "qpat/reconstruction.hpp"

namespace py = pybind11;
using namespace qpat;

namespace
{
using Point = std::array<double, 3>;

Vec3 vec(Point const& p) { return {p[0], p[1], p[2]}; }

// (nz, ny, nx) view in C order, which is the x-fastest layout of GridField3
py::array_t<double> to_array(GridField3 const& field)
{
    auto const& g = field.geometry();
    py::array_t<double> out({g.nz, g.ny, g.nx});
    std::copy(field.values().begin(), field.values().end(), out.mutable_data());
    return out;
}

py::dict geometry_dict(GridGeometry const& g)
{
    py::dict d;
    d["shape"] = py::make_tuple(g.nz, g.ny, g.nx);
    d["spacing"] = g.h;
    d["origin"] = Point{g.origin.x, g.origin.y, g.origin.z};
    return d;
}

py::dict result_dict(ReconResult const& r)
{
    py::dict d;
    d["alpha1_eps"] = to_array(r.alpha1_eps);
    d["f"] = to_array(r.f);
    d["rho1_eps"] = to_array(r.rho1_eps);
    d["diagnostics"] = r.diagnostics;
    d["geometry"] = geometry_dict(r.f.geometry());
    return d;
}

Scene scene_from_json(std::string const& text)
{
    return parse_config("{\"scene\": " + text + "}", "<scene>").scene;
}
}  // namespace

PYBIND11_MODULE(_qpat, m)
{
    m.doc() = "Quantitative photoacoustic tomography with perturbed sound speed and density.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def("set_thread_count", &set_thread_count, py::arg("n"));

    py::class_<Scene>(m, "Scene")
        .def_static("default", &Scene::default_scene)
        .def_static("from_json", &scene_from_json, py::arg("text"))
        .def("to_json", [](Scene const& s) { return scene_to_json(s).dump(); })
        .def("hash", [](Scene const& s) { return scene_hash(s); })
        .def_readwrite("epsilon", &Scene::epsilon)
        .def_readwrite("omega_radius", &Scene::omega_radius)
        .def_readwrite("sigma_radius", &Scene::sigma_radius)
        .def("f", [](Scene const& s, Point p) { return s.f.value(vec(p)); })
        .def("alpha1", [](Scene const& s, Point p) { return s.alpha1.value(vec(p)); })
        .def("rho1", [](Scene const& s, Point p) { return s.rho1.value(vec(p)); });

    m.def(
        "kernel_eval",
        [](Scene const& s, double t, Point x, Point y) {
            KernelTerms k = kernel_eval(s, t, vec(x), vec(y));
            py::dict d;
            d["leading"] = k.leading;
            d["alpha_term"] = k.alpha_term;
            d["rho_term_linear"] = k.rho_term_linear;
            d["rho_term_quadratic"] = k.rho_term_quadratic;
            d["total"] = k.total();
            return d;
        },
        py::arg("scene"), py::arg("t"), py::arg("x"), py::arg("y"));
    m.def(
        "kernel_dt_limit", [](Scene const& s, Point x, Point y) { return kernel_dt_limit(s, vec(x), vec(y)); },
        py::arg("scene"), py::arg("x"), py::arg("y"));
    m.def(
        "kernel_dtt_limit", [](Scene const& s, Point x, Point y) { return kernel_dtt_limit(s, vec(x), vec(y)); },
        py::arg("scene"), py::arg("x"), py::arg("y"));
    m.def(
        "t_support_bound", [](Scene const& s, Point x, Point y) { return t_support_bound(s, vec(x), vec(y)); },
        py::arg("scene"), py::arg("x"), py::arg("y"));
    m.def(
        "kernel_large_t",
        [](Scene const& s, double t, Point x, Point y) { return kernel_large_t(s, t, vec(x), vec(y)); },
        py::arg("scene"), py::arg("t"), py::arg("x"), py::arg("y"));
    m.def(
        "mc_kernel_integrals",
        [](Scene const& s, double t, Point x, Point y, std::size_t samples, std::uint64_t seed) {
            OracleConfig cfg;
            cfg.sample_count = samples;
            cfg.rng_seed = seed;
            McEstimate e = mc_kernel_integrals(s, t, vec(x), vec(y), cfg);
            return py::make_tuple(e.estimate, e.std_error);
        },
        py::arg("scene"), py::arg("t"), py::arg("x"), py::arg("y"), py::arg("samples") = 1000000,
        py::arg("seed") = 20240917);

    m.def(
        "pipeline_analytic",
        [](Scene const& s, int nodes, double half_width) {
            PipelineSpec spec;
            spec.lattice = GridGeometry::cube(half_width, nodes);
            ReconResult r;
            {
                py::gil_scoped_release release;
                r = full_pipeline_analytic(s, spec);
            }
            return result_dict(r);
        },
        py::arg("scene"), py::arg("nodes") = 48, py::arg("half_width") = 1.0);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_static("parse", &parse_config, py::arg("text"), py::arg("origin") = "<config>")
        .def_static("load", &load_config, py::arg("path"))
        .def("to_json", [](RunConfig const& c) { return to_json(c).dump(); })
        .def_readwrite("scene", &RunConfig::scene)
        .def_property(
            "path", [](RunConfig const& c) { return to_string(c.path); },
            [](RunConfig& c, std::string const& p) { c.path = parse_pipeline_path(p); });

    m.def(
        "synthesize",
        [](RunConfig const& c, fs::path const& out_dir) {
            py::gil_scoped_release release;
            return cmd_synthesize(c, out_dir).measurements;
        },
        py::arg("config"), py::arg("out_dir"));
    m.def(
        "reconstruct",
        [](RunConfig const& c, fs::path const& out_dir, std::optional<fs::path> input) {
            ReconResult r;
            {
                py::gil_scoped_release release;
                r = cmd_reconstruct(c, out_dir, input);
            }
            return result_dict(r);
        },
        py::arg("config"), py::arg("out_dir"), py::arg("input") = py::none());
    m.def(
        "verify",
        [](RunConfig const& c, fs::path const& out_dir) {
            py::list out;
            for (auto const& chk : cmd_verify(c, out_dir))
            {
                py::dict d;
                d["name"] = chk.name;
                d["passed"] = chk.passed;
                d["value"] = chk.value;
                d["tolerance"] = chk.tolerance;
                d["detail"] = chk.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("config"), py::arg("out_dir") = fs::path{});
    m.def("export_slices", &cmd_export_slices, py::arg("field"), py::arg("axis"), py::arg("indices"),
          py::arg("out_dir"));

    m.def(
        "read_field",
        [](fs::path const& path) {
            GridField3 f = read_field(path);
            return py::make_tuple(to_array(f), geometry_dict(f.geometry()));
        },
        py::arg("path"));
    m.def(
        "write_field",
        [](fs::path const& path, py::array_t<double, py::array::c_style | py::array::forcecast> a, double spacing,
           Point origin) {
            if (a.ndim() != 3)
            {
                throw PreconditionError("write_field: expected a 3-d array");
            }
            GridGeometry g{int(a.shape(2)), int(a.shape(1)), int(a.shape(0)), spacing, vec(origin)};
            g.validate();
            write_field(path, GridField3(g, std::vector<double>(a.data(), a.data() + a.size())));
        },
        py::arg("path"), py::arg("values"), py::arg("spacing"), py::arg("origin") = Point{0, 0, 0});
}
