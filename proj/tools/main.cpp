#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "polpair/errors.hpp"
#include "polpair/parallel.hpp"

int main(int argc, char** argv)
{
    using namespace polpair::cli;

    CLI::App app{"Photon pair production in dispersive dielectrics"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = "./out";
    unsigned threads = 0;
    app.set_version_flag("--version", POLPAIR_VERSION);

    for (const char* name : {"dispersion", "spectrum", "rate", "cones", "ft-check"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config file (key = value)")->required();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--threads", threads, "worker threads (default: all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.threads = threads == 0 ? polpair::default_thread_count() : threads;
    if (const char* seedless = std::getenv("POLPAIR_SEEDLESS"); seedless && std::string(seedless) == "1") {
        ctx.threads = 1;
    }
    ctx.log = &std::cout;
    try {
        ctx.config = Config::load(config_path);
    } catch (const polpair::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const polpair::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run_command(app.get_subcommands().front()->get_name(), ctx, std::cerr);
}
