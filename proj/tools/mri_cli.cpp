// Command-line experiment runner for minimal rational interpolation.
//
//   mri <build|sweep|estimate|greedy|nodes> --config FILE [--seed U64]
//       [--out DIR] [--threads INT] [--tol FLOAT]

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <mri/cli/commands.hpp>

namespace
{

std::size_t threads_from_env()
{
    const char* env = std::getenv("MRI_THREADS");
    if (env == nullptr || *env == '\0')
    {
        return 1;
    }
    try
    {
        const long value = std::stol(env);
        return value > 0 ? std::size_t(value) : 1;
    }
    catch (const std::exception&)
    {
        throw mri::cli::ConfigError("MRI_THREADS must be a positive integer");
    }
}

} // namespace

int main(int argc, char** argv)
{
    using namespace mri::cli;

    CLI::App app{"Minimal rational interpolation of parametric solution maps"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::size_t threads = 0;
    double tol          = 0;

    const std::pair<const char*, const char*> commands[] = {
        {"build", "build one interpolant and write it as JSON"},
        {"sweep", "pole errors and surrogate errors over a range of S"},
        {"estimate", "exact and estimated residuals on a parameter grid"},
        {"greedy", "adaptive sampling driven by the residual estimator"},
        {"nodes", "write the sample points"},
    };
    for (const auto& [name, help] : commands)
    {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
        sub->add_option("--seed", seed, "override the configured seed");
        sub->add_option("--out", out_dir, "override the output directory");
        sub->add_option("--threads", threads, "worker threads (default: MRI_THREADS or 1)");
        sub->add_option("--tol", tol, "greedy tolerance");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    const auto* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    try
    {
        auto config = parse_config(read_text(config_path));
        if (chosen->count("--seed") > 0)
        {
            config.seed = seed;
        }
        if (chosen->count("--out") > 0)
        {
            config.output = out_dir;
        }
        if (chosen->count("--tol") > 0)
        {
            if (!(tol > 0))
            {
                throw ConfigError("--tol must be positive");
            }
            config.greedy.tolerance = tol;
        }
        RunOptions run;
        run.base_dir = std::filesystem::path(config_path).parent_path();
        if (run.base_dir.empty())
        {
            run.base_dir = ".";
        }
        run.threads = chosen->count("--threads") > 0 ? std::max<std::size_t>(threads, 1)
                                                     : threads_from_env();

        if (command == "build")
        {
            return cmd_build(config, run, std::cout);
        }
        if (command == "sweep")
        {
            return cmd_sweep(config, run, std::cout);
        }
        if (command == "estimate")
        {
            return cmd_estimate(config, run, std::cout);
        }
        if (command == "greedy")
        {
            return cmd_greedy(config, run, std::cout);
        }
        return cmd_nodes(config, run, std::cout);
    }
    catch (const ConfigError& e)
    {
        std::cerr << "mri " << command << ": configuration error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const mri::Error& e)
    {
        std::cerr << "mri " << command << ": " << mri::to_string(e.kind()) << ": " << e.what()
                  << "\n";
        return exit_numeric;
    }
}
