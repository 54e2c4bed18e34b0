#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpat/commands.hpp"
#include "qpat/error.hpp"
#include "qpat/io.hpp"
#include "qpat/parallel.hpp"

namespace
{
enum Exit
{
    ok = 0,
    config_error = 1,
    numerical_failure = 2,
    io_error = 3
};

struct Common
{
    std::string config;
    std::string output;
    int threads{0};
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "Run configuration (JSON)");
    cmd->add_option("--output", c.output, "Output directory (overrides the config)");
    cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

qpat::RunConfig resolve(Common const& c)
{
    qpat::RunConfig cfg = c.config.empty() ? qpat::RunConfig{} : qpat::load_config(c.config);
    if (!c.output.empty())
    {
        cfg.output = c.output;
    }
    qpat::set_thread_count(c.threads);
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantitative photoacoustic reconstruction with acoustic perturbations"};
    app.require_subcommand(1);

    Common common;
    std::string path_flag;
    std::string input;
    std::string field;
    int axis = 2;
    std::vector<int> indices;

    auto* syn = app.add_subcommand("synthesize", "Synthesize plane-illumination measurements");
    add_common(syn, common);

    auto* rec = app.add_subcommand("reconstruct", "Recover eps alpha1, f and eps rho1");
    add_common(rec, common);
    rec->add_option("--path", path_flag, "Limit source")->check(CLI::IsMember({"analytic", "numeric"}));
    rec->add_option("--input", input, "Measurement file for the numeric path");

    auto* ver = app.add_subcommand("verify", "Run the oracle comparison suite");
    add_common(ver, common);

    auto* exp = app.add_subcommand("export-slices", "Write grayscale PNG slices of a field file");
    exp->add_option("field", field, "Field file (.bin with a .json sidecar)")->required();
    exp->add_option("--axis", axis, "0 = x, 1 = y, 2 = z")->check(CLI::Range(0, 2));
    exp->add_option("--index", indices, "Slice indices (default: middle)");
    exp->add_option("--output", common.output, "Output directory");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try
    {
        if (*syn)
        {
            auto cfg = resolve(common);
            auto out = qpat::cmd_synthesize(cfg, cfg.output);
            std::cout << "wrote " << out.measurements.string() << '\n';
        }
        else if (*rec)
        {
            auto cfg = resolve(common);
            if (!path_flag.empty())
            {
                cfg.path = qpat::parse_pipeline_path(path_flag);
            }
            std::optional<std::filesystem::path> in;
            if (!input.empty())
            {
                in = input;
            }
            auto result = qpat::cmd_reconstruct(cfg, cfg.output, in);
            for (auto const& [k, v] : result.diagnostics)
            {
                std::cout << k << " = " << v << '\n';
            }
        }
        else if (*ver)
        {
            auto cfg = resolve(common);
            auto checks = qpat::cmd_verify(cfg, cfg.output);
            bool all = true;
            for (auto const& c : checks)
            {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (tolerance "
                          << c.tolerance << ") " << c.detail << '\n';
                all = all && c.passed;
            }
            return all ? ok : numerical_failure;
        }
        else if (*exp)
        {
            std::filesystem::path out = common.output.empty() ? std::string(".") : common.output;
            if (indices.empty())
            {
                auto g = qpat::read_field(field).geometry();
                int dims[3] = {g.nx, g.ny, g.nz};
                indices.push_back(dims[axis] / 2);
            }
            for (auto const& p : qpat::cmd_export_slices(field, axis, indices, out))
            {
                std::cout << "wrote " << p.string() << '\n';
            }
        }
    }
    catch (qpat::NumericalError const& e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
    catch (qpat::IoError const& e)
    {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    }
    catch (qpat::Error const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }
    return ok;
}
