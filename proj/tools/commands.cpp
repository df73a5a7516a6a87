#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "output.hpp"
#include "polpair/emission.hpp"
#include "polpair/errors.hpp"
#include "polpair/parallel.hpp"

#ifndef POLPAIR_VERSION
#define POLPAIR_VERSION "unknown"
#endif

namespace polpair::cli {

namespace {

constexpr double kC = kSpeedOfLight;

std::vector<std::string> file_header(const RunContext& ctx, const std::string& command, const Medium& medium,
                                     const std::string& provenance, const std::string& units)
{
    return {
        fmt::format("polpair {}", POLPAIR_VERSION),
        fmt::format("command: {}", command),
        fmt::format("config_hash: {}", ctx.config.hash()),
        fmt::format("medium: {} ({} resonances)", medium.name(), medium.resonance_count()),
        fmt::format("provenance: {}", provenance),
        fmt::format("units: {}", units),
    };
}

void log_line(const RunContext& ctx, const std::string& text)
{
    if (ctx.log) {
        *ctx.log << text << '\n';
    }
}

void ensure_out_dir(const RunContext& ctx)
{
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec || !std::filesystem::is_directory(ctx.out_dir)) {
        throw IoError(fmt::format("cannot create output directory '{}'", ctx.out_dir.string()));
    }
}

// Cell widths with edges at midpoints; outer cells extend by half a step
// (clipped to [floor, ceiling]).
std::vector<double> cell_widths(const std::vector<double>& x, double floor, double ceiling)
{
    const std::size_t m = x.size();
    std::vector<double> edges(m + 1);
    for (std::size_t i = 1; i < m; ++i) {
        edges[i] = 0.5 * (x[i - 1] + x[i]);
    }
    const double first = m > 1 ? x[1] - x[0] : 0.0;
    const double last = m > 1 ? x[m - 1] - x[m - 2] : 0.0;
    edges[0] = std::max(floor, x[0] - 0.5 * first);
    edges[m] = std::min(ceiling, x[m - 1] + 0.5 * last);
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
        w[i] = edges[i + 1] - edges[i];
    }
    return w;
}

// Same edges as the spectrum module uses for delta-line deposits.
std::vector<double> omega_cell_widths(const std::vector<double>& w)
{
    const double floor = w.size() > 1 ? std::max(0.5 * w[0], w[0] - 0.5 * (w[1] - w[0])) : 0.5 * w[0];
    auto out = cell_widths(w, floor, std::numeric_limits<double>::infinity());
    if (w.size() == 1) {
        out[0] = 0.1 * w[0];
    }
    return out;
}

int resolve_branch(const Medium& medium, const Config& config, const std::string& key, double omega)
{
    if (config.has(key)) {
        const int b = config.get_int(key);
        if (b < 0 || b >= static_cast<int>(medium.branch_count())) {
            throw ConfigError(fmt::format("{} = {} is out of range 0..{}", key, b, medium.branch_count() - 1));
        }
        const auto interval = branch_interval(medium, b);
        if (!(omega > interval.lower && omega < interval.upper)) {
            throw ConfigError(fmt::format("omega = {:.6g} rad/s is not on branch {} ({}: [{:.6g}, {:.6g}))", omega,
                                          b, key, interval.lower, interval.upper));
        }
        return b;
    }
    const auto b = branch_of_frequency(medium, omega);
    if (!b) {
        throw ConfigError(fmt::format("omega = {:.6g} rad/s lies in an evanescent band or on a pole", omega));
    }
    return *b;
}

}  // namespace

//---------------------------------------------------------------------------//
// Config to library objects
//---------------------------------------------------------------------------//

Medium build_medium(const Config& config)
{
    const std::string name = config.get_string("medium.name", "fused_silica");
    const bool sellmeier = config.has("medium.sellmeier.a") || config.has("medium.sellmeier.l_um");
    const bool explicit_list = config.has("medium.omega0") || config.has("medium.chi0");
    if (sellmeier && explicit_list) {
        throw ConfigError("give either medium.sellmeier.* or medium.omega0/medium.chi0, not both");
    }
    if (sellmeier) {
        const auto a = config.get_list("medium.sellmeier.a");
        const auto l = config.get_list("medium.sellmeier.l_um");
        return sellmeier_to_resonances(a, l, name);
    }
    if (explicit_list) {
        const auto w0 = config.get_list("medium.omega0");
        const auto chi = config.get_list("medium.chi0");
        if (w0.size() != chi.size()) {
            throw ConfigError("medium.omega0 and medium.chi0 differ in length");
        }
        std::vector<Resonance> res;
        for (std::size_t i = 0; i < w0.size(); ++i) {
            res.push_back({w0[i], chi[i]});
        }
        return Medium(name, std::move(res));
    }
    if (name == "fused_silica") {
        return fused_silica();
    }
    if (name == "diamond_demo") {
        return diamond_demo();
    }
    throw ConfigError(fmt::format("medium.name = {} needs medium.sellmeier.* or medium.omega0/chi0", name));
}

DispersionOptions build_dispersion_options(const Config& config)
{
    DispersionOptions o;
    o.pole_guard = config.get_double("medium.pole_guard", kDefaultPoleGuard);
    o.max_iter = config.get_int("medium.max_iter", kDefaultMaxIter);
    if (!(o.pole_guard > 0.0) || o.max_iter < 1) {
        throw ConfigError("medium.pole_guard must be > 0 and medium.max_iter >= 1");
    }
    return o;
}

numerics::SampledSignal read_sampled_profile(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot read sampled profile '{}'", path.string()));
    }
    std::vector<double> t;
    std::vector<double> f;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') {
            continue;
        }
        std::istringstream row(line);
        double a = 0.0;
        double b = 0.0;
        std::string rest;
        if (!(row >> a >> b) || (row >> rest)) {
            throw ConfigError(fmt::format("{}:{}: expected two numeric columns", path.string(), number));
        }
        t.push_back(a);
        f.push_back(b);
    }
    if (t.size() < 2) {
        throw ConfigError(fmt::format("{}: need at least two samples", path.string()));
    }
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * std::abs(dt)) {
            throw ConfigError(fmt::format("{}: samples are not uniformly spaced", path.string()));
        }
    }
    numerics::SampledSignal s;
    s.t0 = t.front();
    s.dt = dt;
    for (double v : f) {
        s.samples.emplace_back(v, 0.0);
    }
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return s;
}

std::optional<Perturbation> build_perturbation(const Config& config)
{
    const std::string kind = config.get_string("perturbation.kind", "none");
    std::optional<SpatialTransform> envelope;
    if (config.has("perturbation.envelope.sigma")) {
        const double sigma = config.get_double("perturbation.envelope.sigma");
        if (!(sigma > 0.0)) {
            throw ConfigError("perturbation.envelope.sigma must be > 0");
        }
        // Transform of exp(-r^2 / 2 sigma^2).
        const double norm = std::pow(kTwoPi, 1.5) * sigma * sigma * sigma;
        envelope = [sigma, norm](const Vec3& k) { return norm * std::exp(-0.5 * sigma * sigma * k.dot(k)); };
    }
    auto with_envelope = [&](TimeProfile t) -> Perturbation {
        if (envelope) {
            return TimeProfileWithEnvelope{t, *envelope};
        }
        return std::visit([](auto x) -> Perturbation { return x; }, t);
    };

    std::optional<Perturbation> p;
    if (kind == "none") {
        return std::nullopt;
    } else if (kind == "travelling_gaussian") {
        if (envelope) {
            throw ConfigError("perturbation.envelope.sigma applies to time profiles only");
        }
        p = TravellingGaussian{config.get_double("perturbation.dchi0"), config.get_double("perturbation.sigma_rho"),
                               config.get_double("perturbation.sigma_z"), config.get_double("perturbation.v"),
                               config.get_double("perturbation.T")};
    } else if (kind == "time_gaussian") {
        p = with_envelope(TimeGaussian{config.get_double("perturbation.eta"), config.get_double("perturbation.a")});
    } else if (kind == "time_tanh") {
        p = with_envelope(TimeTanhStep{config.get_double("perturbation.eta"), config.get_double("perturbation.a")});
    } else if (kind == "time_sinusoid") {
        p = with_envelope(TimeSinusoid{config.get_double("perturbation.eta"), config.get_double("perturbation.a")});
    } else if (kind == "sampled") {
        p = SampledProfile{read_sampled_profile(config.get_string("perturbation.file")), envelope};
    } else {
        throw ConfigError(fmt::format("unknown perturbation.kind '{}'", kind));
    }
    try {
        validate(*p);
    } catch (const InvalidArgument& e) {
        throw ConfigError(fmt::format("perturbation: {}", e.what()));
    }
    return p;
}

std::vector<double> build_axis(const Config& config, const std::string& name)
{
    const std::string base = "grid." + name + ".";
    const double lo = config.get_double(base + "min");
    const double hi = config.get_double(base + "max");
    const int count = config.get_int(base + "count");
    const bool has_spacing = config.has(base + "spacing");
    const std::string spacing = has_spacing ? config.get_string(base + "spacing") : "linear";
    if (count < 1) {
        throw ConfigError(fmt::format("{}count must be >= 1", base));
    }
    if (count == 1) {
        return {lo};
    }
    if (!(hi > lo)) {
        throw ConfigError(fmt::format("{}max must exceed {}min", base, base));
    }
    std::vector<double> v(static_cast<std::size_t>(count));
    if (spacing == "linear") {
        for (int i = 0; i < count; ++i) {
            v[i] = lo + (hi - lo) * i / (count - 1);
        }
    } else if (spacing == "log") {
        if (!(lo > 0.0)) {
            throw ConfigError(fmt::format("{}min must be > 0 for log spacing", base));
        }
        const double r = std::log(hi / lo);
        for (int i = 0; i < count; ++i) {
            v[i] = lo * std::exp(r * i / (count - 1));
        }
    } else {
        throw ConfigError(fmt::format("{}spacing must be linear or log", base));
    }
    v.back() = hi;
    return v;
}

//---------------------------------------------------------------------------//
// dispersion
//---------------------------------------------------------------------------//

void check_dispersion_csv(const std::filesystem::path& path, const Medium& medium)
{
    const auto csv = read_csv(path);
    const std::vector<std::string> expected = {"k_rad_per_m", "branch",  "omega_rad_per_s",
                                               "n_phase",     "n_group", "phi"};
    if (csv.columns != expected) {
        throw NumericError(fmt::format("{}: unexpected columns", path.string()));
    }
    const std::size_t branches = medium.branch_count();
    if (csv.rows.size() % branches != 0) {
        throw NumericError(fmt::format("{}: row count is not a multiple of {}", path.string(), branches));
    }
    const auto& res = medium.resonances();
    for (std::size_t r = 0; r < csv.rows.size(); r += branches) {
        double previous = 0.0;
        for (std::size_t b = 0; b < branches; ++b) {
            const auto& row = csv.rows[r + b];
            const double k = std::strtod(row[0].c_str(), nullptr);
            const long branch = std::strtol(row[1].c_str(), nullptr, 10);
            const double w = std::strtod(row[2].c_str(), nullptr);
            const double n = std::strtod(row[3].c_str(), nullptr);
            const double ng = std::strtod(row[4].c_str(), nullptr);
            const double phi = std::strtod(row[5].c_str(), nullptr);
            const auto where = fmt::format("{}: k = {}, branch {}", path.string(), row[0], b);
            if (branch != static_cast<long>(b) || !(w >= previous)) {
                throw NumericError(where + ": branches out of order");
            }
            // A decoupled resonance (chi0 = 0) is a flat branch, not a pole,
            // so the neighbouring branch may touch it.
            if (b < res.size() && (res[b].chi0 > 0.0 ? !(w < res[b].omega0) : !(w <= res[b].omega0))) {
                throw NumericError(where + ": above the next pole");
            }
            if (b > 0 && (res[b - 1].chi0 > 0.0 ? !(w > res[b - 1].omega0) : !(w >= res[b - 1].omega0))) {
                throw NumericError(where + ": below the previous pole");
            }
            const bool flat = std::any_of(res.begin(), res.end(),
                                          [w](const Resonance& r) { return r.chi0 == 0.0 && r.omega0 == w; });
            if (k > 0.0 && !flat && std::abs(kC * k - w * n) > 1e-9 * kC * k) {
                throw NumericError(where + ": c k != w n_p");
            }
            if (std::isfinite(ng) && std::abs(phi - 2.0 / (kC * kC) * w * kTwoPiCubed * ng * n) > 1e-10 * phi) {
                throw NumericError(where + ": Phi identity violated");
            }
            previous = w;
        }
    }
}

void cmd_dispersion(const RunContext& ctx)
{
    const Medium medium = build_medium(ctx.config);
    const DispersionOptions dopt = build_dispersion_options(ctx.config);
    const auto ks = build_axis(ctx.config, "k");
    if (ks.front() < 0.0) {
        throw ConfigError("grid.k.min must be >= 0");
    }
    ensure_out_dir(ctx);

    std::vector<std::vector<BranchPoint>> points(ks.size());
    parallel_for(ks.size(), ctx.threads, [&](std::size_t i) { points[i] = branch_frequencies(medium, ks[i], dopt); });

    CsvTable table;
    table.header = file_header(ctx, "dispersion", medium, "branch_frequencies",
                               "k_rad_per_m=rad/m omega_rad_per_s=rad/s n_phase=1 n_group=1 phi=s/m^2");
    table.columns = {"k_rad_per_m", "branch", "omega_rad_per_s", "n_phase", "n_group", "phi"};
    std::vector<SvgSeries> series(medium.branch_count());
    for (std::size_t b = 0; b < series.size(); ++b) {
        series[b].label = fmt::format("branch {}", b);
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        for (const auto& p : points[i]) {
            table.rows.push_back({p.k_mag, static_cast<long long>(p.branch), p.omega, p.n_phase, p.n_group, p.phi});
            series[static_cast<std::size_t>(p.branch)].points.emplace_back(p.k_mag, p.omega);
        }
    }
    const auto csv_path = ctx.out_dir / "dispersion.csv";
    table.write(csv_path);
    check_dispersion_csv(csv_path, medium);
    log_line(ctx, fmt::format("dispersion: {} k points x {} branches, self-check pass", ks.size(),
                              medium.branch_count()));

    if (ctx.config.get_bool("output.svg", true)) {
        SvgPlot plot{fmt::format("Dispersion branches, {}", medium.name()), "k (rad/m)", "omega (rad/s)", series};
        for (const auto& r : medium.resonances()) {
            plot.series.push_back({fmt::format("omega0 = {:.4g}", r.omega0),
                                   {{ks.front(), r.omega0}, {ks.back(), r.omega0}}});
        }
        plot.write(ctx.out_dir / "dispersion.svg");
    }
}

//---------------------------------------------------------------------------//
// spectrum
//---------------------------------------------------------------------------//

namespace {

PartnerIntegralOptions partner_options(const Config& config, const DispersionOptions& dopt)
{
    PartnerIntegralOptions o;
    o.quad.rel_tol = config.get_double("spectrum.rel_tol", o.quad.rel_tol);
    o.k_scale = config.get_double("spectrum.k_scale", 0.0);
    o.dispersion = dopt;
    if (!(o.quad.rel_tol > 0.0) || o.k_scale < 0.0) {
        throw ConfigError("spectrum.rel_tol must be > 0 and spectrum.k_scale >= 0");
    }
    return o;
}

TravellingOptions travelling_options(const Config& config, const DispersionOptions& dopt)
{
    TravellingOptions opt;
    opt.delta_phi = config.get_double("rate.delta_phi", kPi);
    opt.scan_nodes = config.get_int("rate.scan_nodes", opt.scan_nodes);
    opt.dispersion = dopt;
    if (config.has("rate.partner_band.min") || config.has("rate.partner_band.max")) {
        opt.partner_band =
            std::pair{config.get_double("rate.partner_band.min"), config.get_double("rate.partner_band.max")};
    }
    return opt;
}

TimeProfileOptions time_options(const Config& config, const PartnerIntegralOptions& partner, unsigned threads)
{
    TimeProfileOptions o;
    o.volume = config.get_double("spectrum.volume", 0.0);
    o.observation_time = config.get_double("spectrum.observation_time", 0.0);
    o.threads = threads;
    o.partner = partner;
    return o;
}

void write_spectrum_json(const RunContext& ctx, const std::string& axes, const std::string& quantity,
                         const std::string& unit, double total, const std::string& total_unit, double lines_total,
                         std::size_t line_count)
{
    nlohmann::ordered_json j;
    j["software"] = fmt::format("polpair {}", POLPAIR_VERSION);
    j["config_hash"] = ctx.config.hash();
    j["axes"] = axes;
    j["quantity"] = quantity;
    j["unit"] = unit;
    j["total"] = total;
    j["total_unit"] = total_unit;
    j["total_rule"] = "midpoint cells over the configured grid";
    j["delta_line_count"] = line_count;
    j["delta_line_total"] = lines_total;
    write_text(ctx.out_dir / "spectrum.json", j.dump(2) + "\n");
}

}  // namespace

void cmd_spectrum(const RunContext& ctx)
{
    const Config& cfg = ctx.config;
    const Medium medium = build_medium(cfg);
    const DispersionOptions dopt = build_dispersion_options(cfg);
    const auto p = build_perturbation(cfg);
    const SpectralPerturbation dchi = p ? fourier_transform(*p) : zero_spectrum();
    if (p) {
        for (const auto& w : perturbation_warnings(*p, medium)) {
            log_line(ctx, "warning: " + w);
        }
    }
    const std::string axes = cfg.get_string("spectrum.axes", "omega_theta");
    const auto omega = build_axis(cfg, "omega");
    const PartnerIntegralOptions popt = partner_options(cfg, dopt);
    ensure_out_dir(ctx);

    CsvTable table;
    std::string quantity;
    std::string unit;
    double total = 0.0;
    std::string total_unit;
    double lines_total = 0.0;
    std::size_t line_count = 0;
    std::string provenance;

    if (axes == "omega_theta") {
        const auto theta = build_axis(cfg, "theta");
        if (theta.front() < 0.0 || theta.back() > kPi) {
            throw ConfigError("grid.theta must lie in [0, pi]");
        }
        quantity = "dN/(domega dOmega)";
        unit = "s/sr";
        std::vector<double> values(omega.size() * theta.size(), 0.0);
        if (!p) {
            provenance = "zero perturbation";
        } else if (const auto* tg = std::get_if<TravellingGaussian>(&*p)) {
            // Large-T rate per unit time, partner direction integrated.
            provenance = "travelling_rate_over_partner_angles";
            quantity = "dN/(2T domega dOmega)";
            unit = "1/sr";
            const TravellingOptions topt = travelling_options(cfg, dopt);
            numerics::QuadratureSpec quad{cfg.get_double("spectrum.rel_tol", 1e-4), 0.0, 20'000};
            std::vector<int> branch(omega.size());
            std::vector<int> partner(omega.size());
            for (std::size_t i = 0; i < omega.size(); ++i) {
                branch[i] = resolve_branch(medium, cfg, "spectrum.branch", omega[i]);
                partner[i] = cfg.get_int("spectrum.partner_branch", branch[i]);
            }
            parallel_for(values.size(), ctx.threads, [&](std::size_t idx) {
                const std::size_t i = idx / theta.size();
                const std::size_t j = idx % theta.size();
                values[idx] = travelling_rate_over_partner_angles(medium, *tg, omega[i], theta[j], branch[i],
                                                                  partner[i], topt, quad);
            });
        } else {
            if (cfg.has("spectrum.branch")) {
                throw ConfigError("spectrum.branch does not apply to time profiles (all branches are summed)");
            }
            provenance = "time_profile_spectrum";
            const auto tp = time_profile_spectrum(medium, dchi, omega, time_options(cfg, popt, ctx.threads), dopt);
            // Isotropic: every theta column carries the branch-summed value.
            for (std::size_t i = 0; i < omega.size(); ++i) {
                double sum = 0.0;
                for (std::size_t b = 0; b < medium.branch_count(); ++b) {
                    sum += tp.grid.at(i, b);
                }
                for (std::size_t j = 0; j < theta.size(); ++j) {
                    values[i * theta.size() + j] = sum;
                }
            }
            CsvTable lines;
            lines.header = file_header(ctx, "spectrum", medium, "time_profile_spectrum delta lines",
                                       "omega=rad/s omega_prime=rad/s delta_frequency=rad/s k=rad/m weight=1/sr");
            lines.columns = {"branch",    "partner_branch", "delta_frequency", "omega",
                             "omega_prime", "k_rad_per_m",  "residual",        "weight"};
            for (const auto& l : tp.lines) {
                lines.rows.push_back({static_cast<long long>(l.branch), static_cast<long long>(l.partner_branch),
                                      l.delta_frequency, l.omega, l.omega_prime, l.k_mag, l.residual, l.weight});
                lines_total += 4.0 * kPi * l.weight;
            }
            line_count = tp.lines.size();
            lines.write(ctx.out_dir / "spectrum_lines.csv");
        }
        const auto dw = omega_cell_widths(omega);
        const auto dth = cell_widths(theta, 0.0, kPi);
        for (std::size_t i = 0; i < omega.size(); ++i) {
            for (std::size_t j = 0; j < theta.size(); ++j) {
                const double solid = theta.size() == 1 ? 4.0 * kPi : kTwoPi * std::sin(theta[j]) * dth[j];
                total += values[i * theta.size() + j] * dw[i] * solid;
            }
        }
        total_unit = quantity == "dN/(domega dOmega)" ? "pairs" : "pairs/s";
        table.columns = {"omega_rad_per_s", "theta_rad", "value"};
        for (std::size_t i = 0; i < omega.size(); ++i) {
            for (std::size_t j = 0; j < theta.size(); ++j) {
                table.rows.push_back({omega[i], theta[j], values[i * theta.size() + j]});
            }
        }
        table.header = file_header(ctx, "spectrum", medium, provenance,
                                   fmt::format("omega_rad_per_s=rad/s theta_rad=rad value={}", unit));
        table.header.push_back("quantity: " + quantity);
    } else if (axes == "omega_omega_prime") {
        if (dchi.support == SpatialSupport::Homogeneous) {
            throw ConfigError(
                "homogeneous time profiles emit back to back only; use spectrum.axes = omega_theta or add "
                "perturbation.envelope.sigma");
        }
        const auto omega_prime = build_axis(cfg, "omega_prime");
        const double th = cfg.get_double("spectrum.theta", 0.0);
        const double thp = cfg.get_double("spectrum.theta_prime", kPi);
        const double dphi = cfg.get_double("spectrum.delta_phi", kPi);
        quantity = "dN/(domega dOmega domega' dOmega')";
        unit = "s^2/sr^2";
        std::vector<int> a(omega.size());
        std::vector<int> b(omega_prime.size());
        for (std::size_t i = 0; i < omega.size(); ++i) {
            a[i] = resolve_branch(medium, cfg, "spectrum.branch", omega[i]);
        }
        for (std::size_t j = 0; j < omega_prime.size(); ++j) {
            b[j] = resolve_branch(medium, cfg, "spectrum.partner_branch", omega_prime[j]);
        }
        std::vector<double> values(omega.size() * omega_prime.size(), 0.0);
        const PerturbationSet set(dchi);
        const TimeProfileOptions topt = time_options(cfg, popt, 1);
        provenance = dchi.support == SpatialSupport::Full ? "pair_density_summed" : "time_profile_pair_density";
        parallel_for(values.size(), ctx.threads, [&](std::size_t idx) {
            const std::size_t i = idx / omega_prime.size();
            const std::size_t j = idx % omega_prime.size();
            const Vec3 k = direction(th, 0.0) * wavenumber(medium, omega[i], dopt.pole_guard);
            const Vec3 kp = direction(thp, dphi) * wavenumber(medium, omega_prime[j], dopt.pole_guard);
            values[idx] = dchi.support == SpatialSupport::Full
                              ? pair_density_summed(medium, set, a[i], k, b[j], kp, dopt).value
                              : time_profile_pair_density(medium, dchi, a[i], k, b[j], kp, topt, dopt).value;
        });
        const auto dw = omega_cell_widths(omega);
        const auto dwp = omega_cell_widths(omega_prime);
        table.columns = {"omega_rad_per_s", "omega_prime_rad_per_s", "value"};
        for (std::size_t i = 0; i < omega.size(); ++i) {
            for (std::size_t j = 0; j < omega_prime.size(); ++j) {
                const double v = values[i * omega_prime.size() + j];
                table.rows.push_back({omega[i], omega_prime[j], v});
                total += v * dw[i] * dwp[j];
            }
        }
        total_unit = "pairs/sr^2";
        table.header = file_header(ctx, "spectrum", medium, provenance,
                                   "omega_rad_per_s=rad/s omega_prime_rad_per_s=rad/s value=s^2/sr^2");
        table.header.push_back("quantity: " + quantity);
        table.header.push_back(fmt::format("directions: theta = {} theta_prime = {} delta_phi = {}",
                                           format_double(th), format_double(thp), format_double(dphi)));
    } else {
        throw ConfigError(fmt::format("spectrum.axes must be omega_theta or omega_omega_prime, not '{}'", axes));
    }
    table.write(ctx.out_dir / "spectrum.csv");
    write_spectrum_json(ctx, axes, quantity, unit, total, total_unit, lines_total, line_count);
    log_line(ctx, fmt::format("spectrum: {} cells, total {} {}", table.rows.size(), format_double(total), total_unit));
}

//---------------------------------------------------------------------------//
// rate
//---------------------------------------------------------------------------//

namespace {

struct RatePoint {
    std::vector<PairDensity> roots;
    std::string status = "ok";
    bool threshold_ok = false;
};

RatePoint evaluate_rate(const Medium& medium, const TravellingGaussian& p, double w, double th, double thp, int alpha,
                        int beta, const TravellingOptions& opt)
{
    RatePoint out;
    try {
        out.threshold_ok = p.v * n_phase(medium, w, opt.dispersion.pole_guard) > kC;
        out.roots = travelling_rate(medium, p, w, th, thp, alpha, beta, opt).roots;
    } catch (const DegenerateJacobian&) {
        out.status = "degenerate_jacobian";
    }
    return out;
}

}  // namespace

void cmd_rate(const RunContext& ctx)
{
    const Config& cfg = ctx.config;
    const Medium medium = build_medium(cfg);
    const DispersionOptions dopt = build_dispersion_options(cfg);
    const auto p = build_perturbation(cfg);
    if (!p || !std::holds_alternative<TravellingGaussian>(*p)) {
        throw ConfigError("rate needs perturbation.kind = travelling_gaussian");
    }
    const auto& tg = std::get<TravellingGaussian>(*p);
    for (const auto& w : perturbation_warnings(*p, medium)) {
        log_line(ctx, "warning: " + w);
    }
    const auto omega = build_axis(cfg, "omega");
    const auto theta = build_axis(cfg, "theta");
    const auto theta_prime = build_axis(cfg, "theta_prime");
    const TravellingOptions opt = travelling_options(cfg, dopt);
    std::vector<int> alpha(omega.size());
    std::vector<int> beta(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) {
        alpha[i] = resolve_branch(medium, cfg, "rate.branch", omega[i]);
        beta[i] = cfg.has("rate.partner_branch") ? cfg.get_int("rate.partner_branch") : alpha[i];
    }
    ensure_out_dir(ctx);

    const std::size_t nt = theta.size();
    const std::size_t ntp = theta_prime.size();
    std::vector<RatePoint> points(omega.size() * nt * ntp);
    parallel_for(points.size(), ctx.threads, [&](std::size_t idx) {
        const std::size_t i = idx / (nt * ntp);
        const std::size_t j = (idx / ntp) % nt;
        const std::size_t l = idx % ntp;
        points[idx] = evaluate_rate(medium, tg, omega[i], theta[j], theta_prime[l], alpha[i], beta[i], opt);
    });

    CsvTable table;
    table.header = file_header(ctx, "rate", medium, std::string(to_string(Provenance::TravellingRate)),
                               "omega=rad/s theta=rad omega_prime=rad/s rate=1/(s rad/s sr sr) kinematic_weight=1");
    table.header.push_back(fmt::format("v = {} m/s, delta_phi = {} rad", format_double(tg.v),
                                       format_double(opt.delta_phi)));
    table.columns = {"omega_rad_per_s", "theta_rad", "theta_prime_rad", "branch",           "partner_branch",
                     "root_count",      "root_index", "omega_prime_rad_per_s", "kinematic_weight", "rate",
                     "threshold_ok",    "status"};
    std::size_t flagged = 0;
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
        const std::size_t i = idx / (nt * ntp);
        const std::size_t j = (idx / ntp) % nt;
        const std::size_t l = idx % ntp;
        const auto& pt = points[idx];
        flagged += pt.status != "ok";
        const auto count = static_cast<long long>(pt.roots.size());
        const std::string thr = pt.threshold_ok ? "true" : "false";
        if (pt.roots.empty()) {
            table.rows.push_back({omega[i], theta[j], theta_prime[l], static_cast<long long>(alpha[i]),
                                  static_cast<long long>(beta[i]), 0LL, 0LL, 0.0, 0.0, 0.0, thr, pt.status});
        }
        for (std::size_t r = 0; r < pt.roots.size(); ++r) {
            const auto& root = pt.roots[r];
            table.rows.push_back({omega[i], theta[j], theta_prime[l], static_cast<long long>(alpha[i]),
                                  static_cast<long long>(beta[i]), count, static_cast<long long>(r + 1),
                                  root.omega_prime, root.kinematic_weight, root.value, thr, pt.status});
        }
    }
    table.write(ctx.out_dir / "rate.csv");
    log_line(ctx, fmt::format("rate: {} grid points, {} flagged", points.size(), flagged));

    if (cfg.has("rate.v_sweep.min")) {
        const double v_lo = cfg.get_double("rate.v_sweep.min");
        const double v_hi = cfg.get_double("rate.v_sweep.max");
        const int count = cfg.get_int("rate.v_sweep.count");
        const double w = cfg.get_double("rate.v_sweep.omega");
        const double th = cfg.get_double("rate.v_sweep.theta", 0.0);
        const double thp = cfg.get_double("rate.v_sweep.theta_prime", kPi / 2);
        if (count < 2 || !(v_hi > v_lo) || !(v_lo > 0.0)) {
            throw ConfigError("rate.v_sweep needs 0 < min < max and count >= 2");
        }
        const int a = resolve_branch(medium, cfg, "rate.branch", w);
        const int b = cfg.has("rate.partner_branch") ? cfg.get_int("rate.partner_branch") : a;
        std::vector<RatePoint> sweep(static_cast<std::size_t>(count));
        std::vector<double> vs(sweep.size());
        for (std::size_t i = 0; i < vs.size(); ++i) {
            vs[i] = v_lo + (v_hi - v_lo) * static_cast<double>(i) / (count - 1);
        }
        parallel_for(sweep.size(), ctx.threads, [&](std::size_t i) {
            auto q = tg;
            q.v = vs[i];
            sweep[i] = evaluate_rate(medium, q, w, th, thp, a, b, opt);
        });
        CsvTable st;
        st.header = file_header(ctx, "rate", medium, "travelling_rate velocity sweep", "v=m/s rate=1/(s rad/s sr sr)");
        st.header.push_back(fmt::format("omega = {} rad/s theta = {} theta_prime = {}", format_double(w),
                                        format_double(th), format_double(thp)));
        bool nondecreasing = true;
        double previous = 0.0;
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            double sum = 0.0;
            for (const auto& r : sweep[i].roots) {
                sum += r.value;
            }
            nondecreasing = nondecreasing && sum >= previous;
            previous = sum;
            st.rows.push_back({vs[i], static_cast<long long>(sweep[i].roots.size()), sum,
                               std::string(sweep[i].threshold_ok ? "true" : "false"), sweep[i].status});
        }
        st.header.push_back(fmt::format("check: rate nondecreasing in v: {}", nondecreasing ? "pass" : "fail"));
        st.columns = {"v_m_per_s", "root_count", "rate", "threshold_ok", "status"};
        st.write(ctx.out_dir / "rate_v_sweep.csv");
        log_line(ctx, fmt::format("rate: v sweep nondecreasing: {}", nondecreasing ? "pass" : "fail"));
    }
}

//---------------------------------------------------------------------------//
// cones
//---------------------------------------------------------------------------//

void cmd_cones(const RunContext& ctx)
{
    const Config& cfg = ctx.config;
    const Medium medium = build_medium(cfg);
    const DispersionOptions dopt = build_dispersion_options(cfg);
    double v = 0.0;
    if (cfg.has("cones.v")) {
        v = cfg.get_double("cones.v");
    } else if (cfg.has("perturbation.v")) {
        v = cfg.get_double("perturbation.v");
    } else {
        throw ConfigError("cones needs cones.v (or perturbation.v)");
    }
    if (!(v > 0.0)) {
        throw ConfigError("cones.v must be > 0");
    }
    const auto omega = build_axis(cfg, "omega");
    const auto omega_prime = build_axis(cfg, "omega_prime");
    ensure_out_dir(ctx);

    std::vector<std::optional<ConeReport>> reports(omega.size() * omega_prime.size());
    parallel_for(reports.size(), ctx.threads, [&](std::size_t idx) {
        const std::size_t i = idx / omega_prime.size();
        const std::size_t j = idx % omega_prime.size();
        try {
            reports[idx] = cone_report(medium, v, omega[i], omega_prime[j], dopt.pole_guard);
        } catch (const NumericError&) {
            // Evanescent band or pole: no index, no cone.
        }
    });

    const double nan = std::numeric_limits<double>::quiet_NaN();
    CsvTable table;
    table.header = file_header(ctx, "cones", medium, "cone_report", "omega=rad/s theta_c=rad");
    table.header.push_back(fmt::format("v = {} m/s", format_double(v)));
    table.columns = {"omega_rad_per_s", "omega_prime_rad_per_s", "threshold_ok", "threshold_ok_prime",
                     "theta_c_rad",     "theta_c_prime_rad",     "relation"};
    for (std::size_t idx = 0; idx < reports.size(); ++idx) {
        const std::size_t i = idx / omega_prime.size();
        const std::size_t j = idx % omega_prime.size();
        const auto& r = reports[idx];
        if (!r) {
            table.rows.push_back({omega[i], omega_prime[j], std::string("false"), std::string("false"), nan, nan,
                                  std::string("no_index")});
            continue;
        }
        table.rows.push_back({omega[i], omega_prime[j], std::string(r->threshold_ok ? "true" : "false"),
                              std::string(r->threshold_ok_prime ? "true" : "false"), r->theta_c.value_or(nan),
                              r->theta_c_prime.value_or(nan),
                              std::string(r->relation ? to_string(*r->relation) : "none")});
    }
    table.write(ctx.out_dir / "cones.csv");
    log_line(ctx, fmt::format("cones: {} points", reports.size()));

    if (cfg.get_bool("output.svg", true)) {
        SvgSeries s{"theta_c(omega)", {}};
        SvgSeries sp{"theta_c(omega')", {}};
        for (std::size_t i = 0; i < omega.size(); ++i) {
            const auto& r = reports[i * omega_prime.size()];
            s.points.emplace_back(omega[i], r && r->theta_c ? *r->theta_c : nan);
        }
        for (std::size_t j = 0; j < omega_prime.size(); ++j) {
            const auto& r = reports[j];
            sp.points.emplace_back(omega_prime[j], r && r->theta_c_prime ? *r->theta_c_prime : nan);
        }
        SvgPlot plot{fmt::format("Cherenkov cone angles, v = {:.6g} c", v / kC), "frequency (rad/s)",
                     "cone angle (rad)", {s, sp}};
        plot.write(ctx.out_dir / "cones.svg");
    }
}

//---------------------------------------------------------------------------//
// ft-check
//---------------------------------------------------------------------------//

bool cmd_ft_check(const RunContext& ctx)
{
    const Config& cfg = ctx.config;
    const Medium medium = build_medium(cfg);
    const auto p = build_perturbation(cfg);
    if (!p || !(std::holds_alternative<TimeGaussian>(*p) || std::holds_alternative<TimeTanhStep>(*p) ||
                std::holds_alternative<TimeSinusoid>(*p))) {
        throw ConfigError("ft-check needs perturbation.kind = time_gaussian, time_tanh or time_sinusoid "
                          "(without an envelope)");
    }
    FtCheckOptions opt;
    opt.samples = static_cast<std::size_t>(cfg.get_int("ft.samples", 0));
    opt.window = cfg.get_double("ft.window", 0.0);
    opt.table_rows = static_cast<std::size_t>(cfg.get_int("ft.rows", 41));
    const double threshold = cfg.get_double("ft.threshold", 1e-5);
    ensure_out_dir(ctx);

    FtCheckReport report;
    try {
        report = ft_check(*p, opt);
    } catch (const WindowTooShort& e) {
        throw WindowTooShort(fmt::format("{}; increase ft.window (and ft.samples to keep the resolution)", e.what()));
    }

    CsvTable table;
    table.header = file_header(ctx, "ft-check", medium, "ft_check " + report.profile,
                               "omega=rad/s transform=rad^2/s (time integral of rad^2/s^2)");
    table.header.push_back(fmt::format("compared_bins: {}", report.compared_bins));
    table.header.push_back(fmt::format("max_rel_dev: {}", format_double(report.max_rel_dev)));
    table.header.push_back(fmt::format("threshold: {}", format_double(threshold)));
    if (report.alt_prefactor_deviation) {
        table.header.push_back(fmt::format("eta pi/sqrt(omega) prefactor form, max rel dev from validated transform: {}",
                                           format_double(*report.alt_prefactor_deviation)));
    }
    for (const auto& d : report.delta_terms) {
        table.header.push_back(fmt::format("delta line: omega = {} weight = {} + {}i", format_double(d.frequency),
                                           format_double(d.weight.real()), format_double(d.weight.imag())));
    }
    if (!report.note.empty()) {
        table.header.push_back("note: " + report.note);
    }
    table.columns = {"omega_rad_per_s", "analytic_re", "analytic_im", "numeric_re", "numeric_im", "rel_dev"};
    for (const auto& r : report.rows) {
        table.rows.push_back(
            {r.omega, r.analytic.real(), r.analytic.imag(), r.numeric.real(), r.numeric.imag(), r.rel_dev});
    }
    table.write(ctx.out_dir / "ft_check.csv");

    const bool pass = report.max_rel_dev <= threshold;
    log_line(ctx, fmt::format("ft-check {}: max relative deviation {:.3e} over {} bins (threshold {:.1e}): {}",
                              report.profile, report.max_rel_dev, report.compared_bins, threshold,
                              pass ? "pass" : "FAIL"));
    if (report.alt_prefactor_deviation) {
        log_line(ctx, fmt::format("ft-check: the eta pi/sqrt(omega) prefactor form deviates by up to {:.3e}",
                                  *report.alt_prefactor_deviation));
    }
    for (const auto& d : report.delta_terms) {
        log_line(ctx, fmt::format("ft-check: delta line at omega = {:.17g}, weight {:.6g}{:+.6g}i", d.frequency,
                                  d.weight.real(), d.weight.imag()));
    }
    return pass;
}

//---------------------------------------------------------------------------//

int run_command(const std::string& command, const RunContext& ctx, std::ostream& err)
{
    try {
        if (command == "dispersion") {
            cmd_dispersion(ctx);
        } else if (command == "spectrum") {
            cmd_spectrum(ctx);
        } else if (command == "rate") {
            cmd_rate(ctx);
        } else if (command == "cones") {
            cmd_cones(ctx);
        } else if (command == "ft-check") {
            return cmd_ft_check(ctx) ? kExitOk : kExitNumeric;
        } else {
            err << "unknown command '" << command << "'\n";
            return kExitConfig;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace polpair::cli
