// Acceptance checks: one line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "config.hpp"
#include "polpair/constants.hpp"
#include "polpair/emission.hpp"
#include "polpair/errors.hpp"
#include "random_media.hpp"

using namespace polpair;
namespace fs = std::filesystem;

namespace {

constexpr double kC = kSpeedOfLight;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double rel_err(double a, double b)
{
    if (a == b) {
        return 0.0;
    }
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const Vec3 v{n(rng), n(rng), n(rng)};
        if (v.norm() > 1e-3) {
            return v.normalized();
        }
    }
}

// A exp(-(W - W0)^2 / 2 sW^2) exp(-sigma^2 |K|^2 / 2)
SpectralPerturbation gaussian_spectrum(double amplitude, double w0, double sw, double sigma)
{
    SpectralPerturbation s;
    s.regular_part = [=](double w, const Vec3& K) {
        const double dw = (w - w0) / sw;
        return Complex(amplitude * std::exp(-0.5 * dw * dw - 0.5 * sigma * sigma * K.dot(K)), 0.0);
    };
    return s;
}

SpectralPerturbation phased_spectrum(double amplitude, double phase_rate, double sigma)
{
    SpectralPerturbation s;
    s.regular_part = [=](double w, const Vec3& K) {
        return std::polar(amplitude * std::exp(-0.5 * sigma * sigma * K.dot(K)), phase_rate * w + K.z * 1e-7);
    };
    return s;
}

// k^2(w) = w^2 n^2(w) / c^2 with complex w, for complex-step derivatives.
std::complex<double> k_squared(const Medium& m, std::complex<double> w)
{
    std::complex<double> n2 = 1.0;
    for (const auto& r : m.resonances()) {
        n2 += r.chi0 / ((r.omega0 - w) * (r.omega0 + w));
    }
    return w * w * n2 / (kC * kC);
}

//---------------------------------------------------------------------------//

Outcome sellmeier_anchor()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Medium m = fused_silica();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double lambda_um = 0.4 + 1.6 * i / 49.0;
        const double w = kTwoPi * kC / (lambda_um * 1e-6);
        const double direct = std::sqrt(sellmeier_n_squared(fused_silica_a(), fused_silica_l_um(), lambda_um));
        worst = std::max(worst, rel_err(n_phase(m, w), direct));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 1.0, fmt::format("max rel dev {:.3g} at 50 wavelengths, {:.3g} s", worst, secs)};
}

Outcome diamond_anchor()
{
    const auto config = cli::Config::load(fs::path(POLPAIR_CONFIG_DIR) / "dispersion_diamond.cfg");
    const Medium m = cli::build_medium(config);
    const auto ks = cli::build_axis(config, "k");
    bool ok = m.resonance_count() == 2 && m.fully_coupled();
    const double w01 = m.resonances()[0].omega0;
    const double w02 = m.resonances()[1].omega0;
    double third_min = branch_interval(m, 2).lower;
    std::vector<double> prev;
    for (double k : ks) {
        const auto b = branch_frequencies(m, k);
        ok = ok && b.size() == 3;
        if (b.size() != 3) {
            break;
        }
        ok = ok && b[0].omega < w01 && w01 < b[1].omega && b[1].omega < w02 && w02 < b[2].omega;
        if (!prev.empty()) {
            for (int a = 0; a < 3; ++a) {
                ok = ok && b[a].omega > prev[a];
            }
        }
        prev = {b[0].omega, b[1].omega, b[2].omega};
        third_min = std::min(third_min, b[2].omega);
    }
    ok = ok && third_min > 4e16;
    return {ok, fmt::format("3 branches at {} k values, monotone and pole-separated, third-branch min {:.4g} rad/s",
                            ks.size(), third_min)};
}

struct SuiteResult {
    bool interlaced = true;
    double round_trip = 0.0;
    double phi_dev = 0.0;
    double seconds = 0.0;
    long points = 0;
};

// 1000 random media with N in 1..5, 100 random k each.
const SuiteResult& random_suite()
{
    static const SuiteResult result = [] {
        SuiteResult r;
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(20261015);
        for (int trial = 0; trial < 1000; ++trial) {
            const Medium m = test_support::random_medium(rng, 1 + trial % 5);
            const auto& res = m.resonances();
            for (int j = 0; j < 100; ++j) {
                const double k = test_support::random_k(rng, m);
                const auto b = branch_frequencies(m, k);
                if (b.size() != m.branch_count()) {
                    r.interlaced = false;
                    continue;
                }
                for (std::size_t a = 0; a < res.size(); ++a) {
                    r.interlaced = r.interlaced && b[a].omega < res[a].omega0 && res[a].omega0 < b[a + 1].omega;
                }
                for (const auto& p : b) {
                    // No pole guard: near a pole w(k) is flat, so the round trip
                    // stays well conditioned in w even though k is not.
                    const double k_back = wavenumber(m, p.omega, 0.0);
                    r.round_trip = std::max(r.round_trip, rel_err(branch_point(m, p.branch, k_back).omega, p.omega));

                    // n_g = c dk/dw from a complex-step derivative of k^2(w).
                    const double h = 1e-20 * p.omega;
                    const double dk2 = k_squared(m, {p.omega, h}).imag() / h;
                    const double n_g = kC * dk2 / (2.0 * p.k_mag);
                    const double n_p = kC * p.k_mag / p.omega;
                    const double formula = 2.0 / (kC * kC) * p.omega * kTwoPiCubed * n_g * n_p;
                    r.phi_dev = std::max(r.phi_dev, rel_err(measure_factor(m, p.omega), formula));
                    r.phi_dev = std::max(r.phi_dev, rel_err(p.phi, formula));
                    ++r.points;
                }
            }
        }
        r.seconds = seconds_since(t0);
        return r;
    }();
    return result;
}

Outcome interlacing_suite()
{
    const auto& r = random_suite();
    return {r.interlaced && r.round_trip <= 1e-9 && r.seconds < 30.0,
            fmt::format("{} branch points, interlacing {}, max round-trip rel dev {:.3g}, {:.3g} s", r.points,
                        r.interlaced ? "exact" : "VIOLATED", r.round_trip, r.seconds)};
}

Outcome measure_identity()
{
    const auto& r = random_suite();
    return {r.phi_dev <= 1e-10,
            fmt::format("max rel dev {:.3g} over {} branch points (n_g by complex step)", r.phi_dev, r.points)};
}

Outcome closed_form()
{
    std::mt19937_64 rng(77);
    double worst = 0.0;
    bool sizes = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const Medium m = test_support::random_medium(rng, 1 + trial % 3);
        const double k = test_support::random_k(rng, m);
        const auto bracketed = branch_frequencies(m, k);
        const auto closed = branch_frequencies_closed_form(m, k);
        sizes = sizes && closed.size() == bracketed.size();
        for (std::size_t i = 0; i < std::min(closed.size(), bracketed.size()); ++i) {
            worst = std::max(worst, rel_err(closed[i], bracketed[i].omega));
        }
    }
    return {sizes && worst <= 1e-10, fmt::format("1000 media, max rel dev {:.3g}", worst)};
}

Outcome polarization_oracle()
{
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 k = random_unit(rng) * 2.3e6;
        const Vec3 kp = random_unit(rng) * 8.1e6;
        const Vec3 kph = kp.normalized();
        double sum = 0.0;
        for (const auto& zeta : transverse_basis(k.normalized())) {
            sum += 1.0 - kph.dot(zeta) * kph.dot(zeta);
        }
        const double closed = 1.0 + std::pow(k.normalized().dot(kph), 2);
        worst = std::max({worst, std::abs(sum - closed), std::abs(polarization_sum(k, kp) - closed)});
    }
    return {worst <= 1e-12, fmt::format("10000 direction pairs, max abs dev {:.3g}", worst)};
}

Outcome single_resonance_reduction()
{
    std::mt19937_64 rng(19);
    // sigma keeps |K| sigma below ~1 across the random k range, so the
    // densities stay clear of underflow.
    const auto s = phased_spectrum(3.0, 1e-15, 1e-12);
    double worst = 0.0;
    int compared = 0;
    int underflow = 0;
    int pole = 0;
    bool ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const Medium m = test_support::random_medium(rng, 1);
        const int a1 = static_cast<int>(rng() % 2);
        const int a2 = static_cast<int>(rng() % 2);
        const Vec3 k1 = random_unit(rng) * test_support::random_k(rng, m);
        const Vec3 k2 = random_unit(rng) * test_support::random_k(rng, m);
        PairDensity general;
        try {
            general = pair_density_summed(m, s, a1, k1, a2, k2);
        } catch (const PoleProximity&) {
            ++pole;
            continue;
        }
        const double reduced = pair_density_reduced(m, s, a1, k1, a2, k2).value;
        if (general.value < 1e-280) {
            // Subnormal range: the two product orderings round differently.
            ++underflow;
            ok = ok && reduced < 1e-270;
            continue;
        }
        worst = std::max(worst, rel_err(reduced, general.value));
        ++compared;
    }
    ok = ok && worst <= 1e-12 && compared + pole == 1000;
    return {ok, fmt::format("{} points compared, max rel dev {:.3g} ({} below 1e-280, {} on a pole guard)", compared,
                            worst, underflow, pole)};
}

Outcome superluminal_threshold()
{
    const Medium m = fused_silica();
    std::vector<double> omegas;
    for (int i = 0; i < 31; ++i) {
        omegas.push_back(1e15 + 1e14 * i);
    }
    const std::vector<double> angles{0.0, 0.2, 0.5, 1.0};
    TravellingOptions o;
    o.partner_band = std::pair{omegas.front(), omegas.back()};

    double n_max = 0.0;
    for (double w : omegas) {
        n_max = std::max(n_max, n_phase(m, w));
    }
    // Above threshold the on-axis pairs only exist in a window of relative
    // width ~1e-5 in v (n varies by ~2e-4 across the band), so the v grid
    // has to resolve it.
    const double v_star = kC / n_max;
    const double dv = 1e-6 * v_star;

    bool zero_below = true;
    int first_nonzero = -1;
    std::vector<double> vs;
    for (int j = 0; j < 41; ++j) {
        const double v = v_star - 20.0 * dv + (j + 0.37) * dv;
        vs.push_back(v);
        const TravellingGaussian p{1e28, 1e-7, 1e-8, v, 1e-12};
        double total = 0.0;
        for (double w : omegas) {
            for (double th : angles) {
                for (double thp : angles) {
                    total += travelling_rate(m, p, w, th, thp, 1, 1, o).total();
                }
            }
        }
        if (v * n_max < kC) {
            zero_below = zero_below && total == 0.0;
        }
        if (first_nonzero < 0 && total > 0.0) {
            first_nonzero = j;
        }
    }
    const bool located = first_nonzero > 0 && vs[first_nonzero] >= v_star && vs[first_nonzero - 1] < v_star &&
                         vs[first_nonzero] - v_star <= dv;
    return {zero_below && located,
            fmt::format("v* = c/n_max = {:.9g} m/s, grid step {:.3g} m/s, first nonzero at v = {:.9g} m/s; "
                        "identically zero below v*: {}",
                        v_star, dv, first_nonzero >= 0 ? vs[first_nonzero] : 0.0, zero_below ? "yes" : "no")};
}

Outcome back_to_back_and_selectivity()
{
    const Medium m = fused_silica();
    bool ok = true;

    // Homogeneous Gaussian pulse: only k' = -k carries weight.
    const auto g = fourier_transform(TimeGaussian{1e26, 1e30});
    TimeProfileOptions o;
    o.volume = 1e-12;
    std::mt19937_64 rng(23);
    int off_nonzero = 0;
    int on_zero = 0;
    for (int i = 0; i < 2000; ++i) {
        const Vec3 k = random_unit(rng) * wavenumber(m, 1e15 + 3e15 * (i % 97) / 97.0);
        const Vec3 kp = random_unit(rng) * k.norm() * (0.5 + (i % 11) * 0.1);
        if ((k + kp).norm() > 0.0 && time_profile_pair_density(m, g, 0, k, 0, kp, o).value != 0.0) {
            ++off_nonzero;
        }
        if (!(time_profile_pair_density(m, g, 0, k, 0, -k, o).value > 0.0)) {
            ++on_zero;
        }
    }
    ok = ok && off_nonzero == 0 && on_zero == 0;

    // Sinusoid: weight only on w_alpha + w_beta(k) = a.
    const double a = 5e15;
    const auto s = fourier_transform(TimeSinusoid{1e26, a});
    o.observation_time = 1e-12;
    std::vector<double> grid;
    for (int i = 0; i < 61; ++i) {
        grid.push_back(1e15 + 5e13 * i);
    }
    const auto spec = time_profile_spectrum(m, s, grid, o);
    double residual = 0.0;
    for (const auto& line : spec.lines) {
        const double partner = branch_point(m, line.partner_branch, line.k_mag).omega;
        const double own = branch_point(m, line.branch, line.k_mag).omega;
        residual = std::max({residual, line.residual, std::abs(own + partner - a) / a});
    }
    std::size_t nonzero = 0;
    bool stray = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t b = 0; b < m.branch_count(); ++b) {
            if (spec.grid.at(i, b) == 0.0) {
                continue;
            }
            ++nonzero;
            bool has_line = false;
            for (const auto& line : spec.lines) {
                has_line = has_line || (static_cast<std::size_t>(line.partner_branch) == b &&
                                        std::abs(line.omega - grid[i]) <= 2.5e13);
            }
            stray = stray || !has_line;
        }
    }
    ok = ok && !spec.lines.empty() && residual < 1e-9 && !stray;
    return {ok, fmt::format("off back-to-back nonzero {}/2000; sinusoid {} lines, {} nonzero cells, "
                            "max kinematic residual {:.3g}",
                            off_nonzero, spec.lines.size(), nonzero, residual)};
}

Outcome ft_cross_checks()
{
    const auto gauss = ft_check(TimeGaussian{1e29, 1e28});
    const auto tanh = ft_check(TimeTanhStep{1e29, 1e14});
    const bool ok = gauss.max_rel_dev <= 1e-6 && tanh.max_rel_dev <= 1e-6 && gauss.alt_prefactor_deviation.has_value();
    return {ok, fmt::format("gaussian {:.3g} over {} bins, tanh {:.3g} over {} bins; printed-prefactor form "
                            "deviates by {:.3g}",
                            gauss.max_rel_dev, gauss.compared_bins, tanh.max_rel_dev, tanh.compared_bins,
                            gauss.alt_prefactor_deviation.value_or(-1.0))};
}

Outcome quadratic_response()
{
    double worst = 0.0;
    int checked = 0;
    auto track = [&](double base, double scaled, double s) {
        if (base > 0.0) {
            worst = std::max(worst, rel_err(scaled, s * s * base));
            ++checked;
        } else if (scaled != 0.0) {
            worst = 1.0;
        }
    };
    const std::vector<double> factors{1e-3, 0.5, 3.0, 1e4};

    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 3;
        const Medium m = test_support::random_medium(rng, n);
        std::vector<SpectralPerturbation> per;
        for (int l = 0; l < n; ++l) {
            per.push_back(phased_spectrum(1.0 + 0.5 * l, 2e-16 * (l + 1), 1e-12));
        }
        const PerturbationSet set(per);
        const Vec3 k1 = random_unit(rng) * test_support::random_k(rng, m);
        const Vec3 k2 = random_unit(rng) * test_support::random_k(rng, m);
        const auto z1 = transverse_basis(k1.normalized())[0];
        const auto z2 = transverse_basis(k2.normalized())[1];
        try {
            const double base = pair_density_summed(m, set, 0, k1, n, k2).value;
            const double single = pair_density(m, set, {0, k1, z1}, {n, k2, z2}).value;
            for (double s : factors) {
                track(base, pair_density_summed(m, set.scaled(s), 0, k1, n, k2).value, s);
                track(single, pair_density(m, set.scaled(s), {0, k1, z1}, {n, k2, z2}).value, s);
            }
        } catch (const PoleProximity&) {
        }
    }

    const Medium fs = fused_silica();
    TravellingOptions to;
    to.partner_band = std::pair{5e14, 4e15};
    for (double s : factors) {
        const TravellingGaussian p{1e28, 1e-7, 1e-8, 2.9e8, 1e-12};
        TravellingGaussian ps = p;
        ps.dchi0 *= s;
        const auto base = travelling_rate(fs, p, 3e15, 0.2, 1.2, 1, 1, to);
        const auto scaled = travelling_rate(fs, ps, 3e15, 0.2, 1.2, 1, 1, to);
        for (std::size_t i = 0; i < std::min(base.roots.size(), scaled.roots.size()); ++i) {
            track(base.roots[i].value, scaled.roots[i].value, s);
        }
        if (base.roots.size() != scaled.roots.size() || base.roots.empty()) {
            worst = 1.0;
        }
    }

    TimeProfileOptions o;
    o.volume = 1e-12;
    o.observation_time = 1e-12;
    std::vector<double> grid;
    for (int i = 0; i < 31; ++i) {
        grid.push_back(1e15 + 1e14 * i);
    }
    const Vec3 k{0.0, 0.0, wavenumber(fs, 2e15)};
    for (const Perturbation& pert : std::vector<Perturbation>{TimeGaussian{1e26, 1e30}, TimeTanhStep{1e26, 1e15},
                                                              TimeSinusoid{1e26, 5e15}}) {
        const auto base_ft = fourier_transform(pert);
        const auto base = time_profile_spectrum(fs, base_ft, grid, o);
        const double point = time_profile_pair_density(fs, base_ft, 0, k, 0, -k, o).value;
        for (double s : factors) {
            const auto scaled_ft = base_ft.scaled(s);
            const auto scaled = time_profile_spectrum(fs, scaled_ft, grid, o);
            for (std::size_t i = 0; i < base.grid.values.size(); ++i) {
                track(base.grid.values[i], scaled.grid.values[i], s);
            }
            for (std::size_t i = 0; i < std::min(base.lines.size(), scaled.lines.size()); ++i) {
                track(base.lines[i].weight, scaled.lines[i].weight, s);
            }
            track(point, time_profile_pair_density(fs, scaled_ft, 0, k, 0, -k, o).value, s);
        }
    }

    const Medium single("single", {{2e16, 0.5 * 2e16 * 2e16}});
    const auto g = gaussian_spectrum(1e-3, 4e15, 5e14, 1e-5);
    PartnerIntegralOptions po;
    po.k_scale = 1e5;
    po.quad.rel_tol = 1e-4;
    const Vec3 kk = Vec3{0.3, -0.2, 0.9}.normalized() * wavenumber(single, 2.05e15);
    const double pi_base = partner_integral(single, g, 0, kk, po);
    const double num_base = integrated_photon_number(single, g, 0, Vec3{0, 0, 1}, 1.95e15, 2.05e15, po);
    for (double s : {0.5, 3.0}) {
        const PerturbationSet gs = PerturbationSet(g).scaled(s);
        track(pi_base, partner_integral(single, gs, 0, kk, po), s);
        track(num_base, integrated_photon_number(single, gs, 0, Vec3{0, 0, 1}, 1.95e15, 2.05e15, po), s);
    }

    return {worst <= 1e-10 && checked > 0,
            fmt::format("{} density comparisons, max rel dev from s^2 {:.3g}", checked, worst)};
}

Outcome lattice_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Medium m("single", {{2e16, 0.5 * 2e16 * 2e16}});
    const double sigma = 1e-5;
    const auto s = gaussian_spectrum(1e-3, 4e15, 5e14, sigma);
    const Vec3 dir = Vec3{0.3, -0.2, 0.9}.normalized();
    const double lo = 1.95e15;
    const double hi = 2.05e15;

    PartnerIntegralOptions o;
    o.k_scale = 1.0 / sigma;
    const double quad = integrated_photon_number(m, s, 0, dir, lo, hi, o);

    // Partner integral as a 16^3 midpoint lattice over +-6/sigma around -k,
    // then 5-point Gauss-Legendre over the band.
    auto lattice = [&](double w) {
        const Vec3 k = dir * wavenumber(m, w);
        const int n = 16;
        const double half = 6.0 / sigma;
        const double h = 2.0 * half / n;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int l = 0; l < n; ++l) {
                    const Vec3 kp =
                        -k + Vec3{-half + (i + 0.5) * h, -half + (j + 0.5) * h, -half + (l + 0.5) * h};
                    for (int beta = 0; beta < 2; ++beta) {
                        const double wp = branch_point(m, beta, kp.norm()).omega;
                        const double f = resonance_factor(m.resonances()[0], w, wp);
                        sum += f * f * std::norm(s.value(w + wp, k + kp)) * polarization_sum(k, kp) /
                               measure_factor(m, wp);
                    }
                }
            }
        }
        return sum * h * h * h / std::pow(kC, 4);
    };
    static const double x[] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
    static const double wt[] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                0.2369268850561891};
    double oracle = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double w = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x[i];
        oracle += wt[i] * lattice(w) * w * n_phase(m, w) / (2.0 * kC * kTwoPiCubed);
    }
    oracle *= 0.5 * (hi - lo);
    const double dev = rel_err(quad, oracle);
    const double secs = seconds_since(t0);
    return {quad > 0.0 && dev <= 1e-3 && secs < 120.0,
            fmt::format("quadrature {:.6g}, lattice {:.6g}, rel dev {:.3g}, {:.3g} s", quad, oracle, dev, secs)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism()
{
    const fs::path root = fs::temp_directory_path() / fmt::format("polpair_acceptance_{}", ::getpid());
    fs::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> runs{{"dispersion", "dispersion_diamond.cfg"},
                                                                {"rate", "rate_fused_silica.cfg"},
                                                                {"spectrum", "spectrum_sinusoid.cfg"},
                                                                {"spectrum", "spectrum_travelling.cfg"},
                                                                {"cones", "cones_fused_silica.cfg"}};
    int files = 0;
    int mismatches = 0;
    int failures = 0;
    for (const auto& [cmd, cfg] : runs) {
        std::vector<fs::path> dirs;
        for (const char* tag : {"t1a", "t1b", "t8a", "t8b"}) {
            const fs::path out = root / (cfg + "." + tag);
            const char* threads = tag[1] == '1' ? "1" : "8";
            const std::string line =
                fmt::format("\"{}\" {} --config \"{}\" --out \"{}\" --threads {} > /dev/null 2>&1", POLPAIR_CLI_PATH,
                            cmd, (fs::path(POLPAIR_CONFIG_DIR) / cfg).string(), out.string(), threads);
            if (std::system(line.c_str()) != 0) {
                ++failures;
            }
            dirs.push_back(out);
        }
        for (const auto& entry : fs::directory_iterator(dirs.front())) {
            if (entry.path().extension() != ".csv") {
                continue;
            }
            ++files;
            const std::string ref = slurp(entry.path());
            for (std::size_t i = 1; i < dirs.size(); ++i) {
                if (slurp(dirs[i] / entry.path().filename()) != ref) {
                    ++mismatches;
                }
            }
        }
    }
    fs::remove_all(root);
    return {failures == 0 && mismatches == 0 && files >= runs.size(),
            fmt::format("{} CSV files from {} configs, 2 runs each at --threads 1 and 8: {} mismatches, {} failed runs",
                        files, runs.size(), mismatches, failures)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"sellmeier anchor", sellmeier_anchor},
        {"diamond three-branch anchor", diamond_anchor},
        {"branch interlacing suite", interlacing_suite},
        {"measure-factor identity", measure_identity},
        {"closed-form vs bracketing roots", closed_form},
        {"polarization-sum oracle", polarization_oracle},
        {"single-resonance reduction", single_resonance_reduction},
        {"superluminal threshold", superluminal_threshold},
        {"back-to-back and resonance selectivity", back_to_back_and_selectivity},
        {"transform cross-checks", ft_cross_checks},
        {"quadratic response", quadratic_response},
        {"quadrature vs lattice oracle", lattice_oracle},
        {"determinism across thread counts", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {false, fmt::format("threw: {}", e.what())};
        }
        failed += r.pass ? 0 : 1;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << i + 1 << " " << criteria[i].first << ": " << r.detail
                  << std::endl;
    }
    std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
