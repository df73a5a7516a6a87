#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "polpair/medium.hpp"
#include "polpair/perturbation.hpp"

namespace polpair::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

struct RunContext {
    Config config;
    std::filesystem::path out_dir;
    unsigned threads = 1;
    std::ostream* log = nullptr;  // progress and check reports; may be null
};

Medium build_medium(const Config& config);
DispersionOptions build_dispersion_options(const Config& config);
// Empty for perturbation.kind = none (or no kind at all).
std::optional<Perturbation> build_perturbation(const Config& config);

// Two whitespace-separated columns (t, value) on a uniform grid whose length
// is a power of two.
numerics::SampledSignal read_sampled_profile(const std::filesystem::path& path);

// Axis grid.<name>.{min,max,count,spacing}; strictly increasing.
std::vector<double> build_axis(const Config& config, const std::string& name);

void cmd_dispersion(const RunContext& ctx);
void cmd_spectrum(const RunContext& ctx);
void cmd_rate(const RunContext& ctx);
void cmd_cones(const RunContext& ctx);
// Returns false if the deviation exceeds ft.threshold.
bool cmd_ft_check(const RunContext& ctx);

// Re-reads a dispersion CSV and checks ordering, interlacing and the
// c k = w n_p and Phi identities. Throws NumericError on a violation.
void check_dispersion_csv(const std::filesystem::path& path, const Medium& medium);

// Runs one subcommand and maps library errors to exit codes.
int run_command(const std::string& command, const RunContext& ctx, std::ostream& err);

}  // namespace polpair::cli
