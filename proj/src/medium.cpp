#include "polpair/medium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "polpair/errors.hpp"
#include "polpair/numerics.hpp"

namespace polpair {

namespace {

constexpr double kC = kSpeedOfLight;

// omega0^2 - w^2 in factored form, accurate next to the pole.
double pole_distance(double omega0, double omega)
{
    return (omega0 - omega) * (omega0 + omega);
}

void check_pole_guard(const Medium& medium, double omega, double pole_guard)
{
    for (const auto& r : medium.resonances()) {
        if (r.chi0 > 0.0 && std::abs(omega - r.omega0) <= pole_guard * r.omega0) {
            throw PoleProximity(fmt::format("frequency {:.17g} rad/s is within {:g} (relative) of the pole at {:.17g}",
                                            omega, pole_guard, r.omega0));
        }
    }
}

double n_squared_unguarded(const Medium& medium, double omega)
{
    double n2 = 1.0;
    for (const auto& r : medium.resonances()) {
        if (r.chi0 > 0.0) {
            n2 += r.chi0 / pole_distance(r.omega0, omega);
        }
    }
    return n2;
}

std::vector<Resonance> coupled_resonances(const Medium& medium)
{
    std::vector<Resonance> out;
    for (const auto& r : medium.resonances()) {
        if (r.chi0 > 0.0) {
            out.push_back(r);
        }
    }
    return out;
}

BranchPoint make_branch_point(const Medium& medium, double k_mag, double omega)
{
    BranchPoint p;
    p.k_mag = k_mag;
    p.omega = omega;
    const double bracket = group_phase_product(medium, omega);
    if (omega > 0.0) {
        p.n_phase = kC * k_mag / omega;
    } else {
        p.n_phase = std::sqrt(n_squared_unguarded(medium, 0.0));
    }
    p.n_group = p.n_phase > 0.0 ? bracket / p.n_phase : std::numeric_limits<double>::infinity();
    p.phi = 2.0 / (kC * kC) * omega * kTwoPiCubed * bracket;
    return p;
}

// Root of w^2 n^2(w) - c^2 k^2 on the open interval (lo, hi).
double solve_branch(const Medium& medium, double k_mag, double lo, double hi, const DispersionOptions& options)
{
    const double target = kC * kC * k_mag * k_mag;
    auto g = [&](double w) -> std::pair<double, double> {
        const double value = w * w * n_squared_unguarded(medium, w) - target;
        const double derivative = 2.0 * w * group_phase_product(medium, w);
        return {value, derivative};
    };
    const double root = numerics::polish_root(g, lo, hi, {0.0, options.max_iter});
    return std::clamp(root, lo, hi);
}

}  // namespace

//---------------------------------------------------------------------------//

Medium::Medium(std::string name, std::vector<Resonance> resonances)
    : name_(std::move(name)), resonances_(std::move(resonances))
{
    if (resonances_.empty()) {
        throw InvalidArgument("a medium needs at least one resonance");
    }
    for (const auto& r : resonances_) {
        if (!(r.omega0 > 0.0) || !std::isfinite(r.omega0)) {
            throw InvalidArgument(fmt::format("resonance frequency must be > 0 (got {})", r.omega0));
        }
        if (!(r.chi0 >= 0.0) || !std::isfinite(r.chi0)) {
            throw InvalidArgument(fmt::format("resonance coupling must be >= 0 (got {})", r.chi0));
        }
    }
    std::sort(resonances_.begin(), resonances_.end(),
              [](const Resonance& l, const Resonance& r) { return l.omega0 < r.omega0; });
    for (std::size_t i = 1; i < resonances_.size(); ++i) {
        if (resonances_[i].omega0 == resonances_[i - 1].omega0) {
            throw InvalidArgument(fmt::format("duplicate resonance at {} rad/s", resonances_[i].omega0));
        }
    }
}

bool Medium::fully_coupled() const
{
    return std::all_of(resonances_.begin(), resonances_.end(), [](const Resonance& r) { return r.chi0 > 0.0; });
}

//---------------------------------------------------------------------------//

double n_phase_squared(const Medium& medium, double omega, double pole_guard)
{
    if (!(omega > 0.0)) {
        throw InvalidArgument(fmt::format("frequency must be > 0 (got {})", omega));
    }
    check_pole_guard(medium, omega, pole_guard);
    return n_squared_unguarded(medium, omega);
}

double n_phase(const Medium& medium, double omega, double pole_guard)
{
    const double n2 = n_phase_squared(medium, omega, pole_guard);
    if (!(n2 > 0.0)) {
        throw EvanescentBand(fmt::format("n^2 = {} at {:.17g} rad/s", n2, omega));
    }
    return std::sqrt(n2);
}

double group_phase_product(const Medium& medium, double omega)
{
    double bracket = 1.0;
    for (const auto& r : medium.resonances()) {
        if (r.chi0 > 0.0) {
            const double d = pole_distance(r.omega0, omega);
            bracket += r.chi0 * r.omega0 * r.omega0 / (d * d);
        }
    }
    return bracket;
}

double n_group(const Medium& medium, double omega, double pole_guard)
{
    const double np = n_phase(medium, omega, pole_guard);
    return group_phase_product(medium, omega) / np;
}

double measure_factor(const Medium& medium, double omega)
{
    return 2.0 / (kC * kC) * omega * kTwoPiCubed * group_phase_product(medium, omega);
}

double wavenumber(const Medium& medium, double omega, double pole_guard)
{
    return omega * n_phase(medium, omega, pole_guard) / kC;
}

//---------------------------------------------------------------------------//

Medium sellmeier_to_resonances(std::span<const double> a, std::span<const double> l_um, std::string name)
{
    if (a.size() != l_um.size() || a.empty()) {
        throw InvalidCoefficient(fmt::format("Sellmeier lists must be non-empty and of equal length (got {} and {})",
                                             a.size(), l_um.size()));
    }
    std::vector<Resonance> resonances;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0) || !(l_um[i] > 0.0) || !std::isfinite(a[i]) || !std::isfinite(l_um[i])) {
            throw InvalidCoefficient(
                fmt::format("Sellmeier term {} has non-positive coefficient (a = {}, l = {} um)", i, a[i], l_um[i]));
        }
        const double omega0 = kTwoPi * kC / (l_um[i] * 1e-6);
        resonances.push_back({omega0, a[i] * omega0 * omega0});
    }
    return Medium(std::move(name), std::move(resonances));
}

double sellmeier_n_squared(std::span<const double> a, std::span<const double> l_um, double lambda_um)
{
    double n2 = 1.0;
    const double lam2 = lambda_um * lambda_um;
    for (std::size_t i = 0; i < a.size(); ++i) {
        n2 += a[i] * lam2 / (lam2 - l_um[i] * l_um[i]);
    }
    return n2;
}

namespace {
constexpr std::array<double, 3> kFusedSilicaA = {0.906404498, 0.473115591, 0.631038719};
constexpr std::array<double, 3> kFusedSilicaL = {98.7685322, 0.0129957170, 4.12809220e-3};
constexpr std::array<double, 2> kDiamondA = {0.3306, 4.3356};
constexpr std::array<double, 2> kDiamondL = {0.175, 0.106};
}  // namespace

std::span<const double> fused_silica_a()
{
    return kFusedSilicaA;
}

std::span<const double> fused_silica_l_um()
{
    return kFusedSilicaL;
}

Medium fused_silica()
{
    return sellmeier_to_resonances(kFusedSilicaA, kFusedSilicaL, "fused_silica");
}

Medium diamond_demo()
{
    return sellmeier_to_resonances(kDiamondA, kDiamondL, "diamond_demo");
}

//---------------------------------------------------------------------------//

std::vector<BranchPoint> branch_frequencies(const Medium& medium, double k_mag, const DispersionOptions& options)
{
    if (!(k_mag >= 0.0) || !std::isfinite(k_mag)) {
        throw InvalidArgument(fmt::format("wavenumber must be >= 0 (got {})", k_mag));
    }
    const auto coupled = coupled_resonances(medium);

    std::vector<double> roots;
    if (coupled.empty()) {
        roots.push_back(kC * k_mag);
    } else {
        constexpr double inf = std::numeric_limits<double>::infinity();
        // Lowest branch: [0, omega0_1).
        if (k_mag == 0.0) {
            roots.push_back(0.0);
        } else {
            roots.push_back(solve_branch(medium, k_mag, 0.0, std::nextafter(coupled.front().omega0, 0.0), options));
        }
        for (std::size_t l = 0; l + 1 < coupled.size(); ++l) {
            roots.push_back(solve_branch(medium, k_mag, std::nextafter(coupled[l].omega0, inf),
                                         std::nextafter(coupled[l + 1].omega0, 0.0), options));
        }
        double chi_sum = 0.0;
        for (const auto& r : coupled) {
            chi_sum += r.chi0;
        }
        // X = c^2k^2 + sum chi0 + omega0_N^2 bounds the top root, but the
        // residual there is only ~ c^2k^2 omega0^2 / (c^2k^2 + chi) and rounds
        // to <= 0 for small k. At 2X it is at least sum chi0 + omega0_N^2.
        const double top = coupled.back().omega0;
        const double omega_max = std::sqrt(2.0 * (kC * kC * k_mag * k_mag + chi_sum + top * top));
        roots.push_back(solve_branch(medium, k_mag, std::nextafter(top, inf), omega_max, options));
    }

    std::vector<BranchPoint> points;
    points.reserve(medium.branch_count());
    for (double w : roots) {
        points.push_back(make_branch_point(medium, k_mag, w));
    }
    for (const auto& r : medium.resonances()) {
        if (r.chi0 == 0.0) {
            BranchPoint flat = make_branch_point(medium, k_mag, r.omega0);
            const double n2 = n_squared_unguarded(medium, r.omega0);
            flat.n_phase = n2 > 0.0 ? std::sqrt(n2) : 0.0;
            flat.n_group = flat.n_phase > 0.0 ? group_phase_product(medium, r.omega0) / flat.n_phase
                                              : std::numeric_limits<double>::infinity();
            flat.decoupled = true;
            points.push_back(flat);
        }
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const BranchPoint& l, const BranchPoint& r) { return l.omega < r.omega; });
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].branch = static_cast<int>(i);
    }
    return points;
}

BranchPoint branch_point(const Medium& medium, int alpha, double k_mag, const DispersionOptions& options)
{
    if (alpha < 0 || static_cast<std::size_t>(alpha) >= medium.branch_count()) {
        throw InvalidArgument(fmt::format("branch index {} out of range 0..{}", alpha, medium.resonance_count()));
    }
    return branch_frequencies(medium, k_mag, options)[static_cast<std::size_t>(alpha)];
}

//---------------------------------------------------------------------------//

namespace {

// Multiplies the polynomial p (lowest order first) by (x - root).
std::vector<long double> times_linear(const std::vector<long double>& p, long double root)
{
    std::vector<long double> out(p.size() + 1, 0.0L);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i + 1] += p[i];
        out[i] -= root * p[i];
    }
    return out;
}

// Coefficients in the scaled variable y = x / scale.
std::vector<long double> scaled_dispersion_polynomial(const std::vector<Resonance>& coupled, double k_mag,
                                                      long double scale)
{
    const long double k2 = static_cast<long double>(kC) * kC * k_mag * k_mag / scale;
    std::vector<long double> poles;
    for (const auto& r : coupled) {
        poles.push_back(static_cast<long double>(r.omega0) * r.omega0 / scale);
    }

    std::vector<long double> full = {1.0L};
    for (auto p : poles) {
        full = times_linear(full, p);
    }
    std::vector<long double> result = times_linear(full, k2);

    for (std::size_t l = 0; l < coupled.size(); ++l) {
        std::vector<long double> partial = {0.0L, static_cast<long double>(coupled[l].chi0) / scale};  // chi x
        for (std::size_t m = 0; m < poles.size(); ++m) {
            if (m != l) {
                partial = times_linear(partial, poles[m]);
            }
        }
        for (std::size_t i = 0; i < partial.size(); ++i) {
            result[i] -= partial[i];
        }
    }
    return result;
}

long double polynomial_scale(const std::vector<Resonance>& coupled, double k_mag)
{
    long double scale = static_cast<long double>(kC) * kC * k_mag * k_mag;
    for (const auto& r : coupled) {
        scale = std::max(scale, static_cast<long double>(r.omega0) * r.omega0);
        scale = std::max(scale, static_cast<long double>(r.chi0));
    }
    return scale;
}

}  // namespace

std::vector<double> dispersion_polynomial(const Medium& medium, double k_mag)
{
    const auto coupled = coupled_resonances(medium);
    const long double scale = polynomial_scale(coupled, k_mag);
    const auto scaled = scaled_dispersion_polynomial(coupled, k_mag, scale);
    const std::size_t degree = scaled.size() - 1;
    std::vector<double> out(scaled.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        out[i] = static_cast<double>(scaled[i] * std::pow(scale, static_cast<long double>(degree - i)));
    }
    return out;
}

std::vector<double> branch_frequencies_closed_form(const Medium& medium, double k_mag)
{
    const auto coupled = coupled_resonances(medium);
    if (coupled.size() > 3) {
        throw InvalidArgument("closed-form branch solution only covers up to three coupled resonances");
    }
    std::vector<double> x_roots;
    if (coupled.empty()) {
        x_roots.push_back(kC * kC * k_mag * k_mag);
    } else if (coupled.size() == 1) {
        // Two-branch formula with the discriminant in product form.
        const double w0 = coupled[0].omega0;
        const double chi = coupled[0].chi0;
        const double kc = k_mag * kC;
        const double sum = w0 * w0 + chi + kc * kc;
        const double root = std::sqrt(((kc + w0) * (kc + w0) + chi) * ((kc - w0) * (kc - w0) + chi));
        const double upper = 0.5 * (sum + root);
        x_roots = {kc * kc * w0 * w0 / upper, upper};
    } else {
        const long double scale = polynomial_scale(coupled, k_mag);
        const auto p = scaled_dispersion_polynomial(coupled, k_mag, scale);
        const std::vector<double> coeffs(p.begin(), p.end());
        const auto y = numerics::real_roots_closed_form(coeffs);
        for (double v : y) {
            x_roots.push_back(static_cast<double>(v * scale));
        }
    }

    std::vector<double> omegas;
    for (double x : x_roots) {
        omegas.push_back(std::sqrt(std::max(x, 0.0)));
    }
    for (const auto& r : medium.resonances()) {
        if (r.chi0 == 0.0) {
            omegas.push_back(r.omega0);
        }
    }
    std::sort(omegas.begin(), omegas.end());
    return omegas;
}

//---------------------------------------------------------------------------//

BranchInterval branch_interval(const Medium& medium, int alpha)
{
    if (!medium.fully_coupled()) {
        throw InvalidArgument("branch intervals need a medium with chi0 > 0 for every resonance");
    }
    if (alpha < 0 || static_cast<std::size_t>(alpha) >= medium.branch_count()) {
        throw InvalidArgument(fmt::format("branch index {} out of range 0..{}", alpha, medium.resonance_count()));
    }
    const auto& res = medium.resonances();
    BranchInterval interval;
    interval.lower = branch_frequencies(medium, 0.0)[static_cast<std::size_t>(alpha)].omega;
    interval.upper = static_cast<std::size_t>(alpha) < res.size() ? res[static_cast<std::size_t>(alpha)].omega0
                                                                  : std::numeric_limits<double>::infinity();
    return interval;
}

std::optional<int> branch_of_frequency(const Medium& medium, double omega)
{
    if (!(omega > 0.0)) {
        return std::nullopt;
    }
    const auto& res = medium.resonances();
    int alpha = 0;
    for (const auto& r : res) {
        if (omega == r.omega0) {
            return std::nullopt;
        }
        if (omega > r.omega0) {
            ++alpha;
        }
    }
    if (!(n_squared_unguarded(medium, omega) > 0.0)) {
        return std::nullopt;
    }
    return alpha;
}

}  // namespace polpair
