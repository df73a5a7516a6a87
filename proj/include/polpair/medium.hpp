#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polpair/constants.hpp"

namespace polpair {

// One material oscillator of the dielectric.
struct Resonance {
    double omega0 = 0.0;  // rad/s
    double chi0 = 0.0;    // rad^2/s^2
};

/*!
 * Dispersive, non-dissipative medium with N >= 1 resonances.
 *
 * The squared phase index is
 *   n^2(w) = 1 + sum_l chi0_l / (omega0_l^2 - w^2),
 * and the medium supports N + 1 dispersion branches interlaced with the
 * poles. Resonances are stored sorted by omega0; construction rejects
 * non-positive omega0, negative chi0 and duplicate poles.
 */
class Medium {
public:
    Medium(std::string name, std::vector<Resonance> resonances);

    const std::string& name() const { return name_; }
    const std::vector<Resonance>& resonances() const { return resonances_; }
    std::size_t resonance_count() const { return resonances_.size(); }
    std::size_t branch_count() const { return resonances_.size() + 1; }

    // True when every resonance has chi0 > 0. A resonance with chi0 == 0 is
    // decoupled from the field: it adds a flat branch at omega0 and no pole.
    bool fully_coupled() const;

private:
    std::string name_;
    std::vector<Resonance> resonances_;
};

// One solution w_alpha(|k|) of the dispersion relation with derived scalars.
struct BranchPoint {
    int branch = 0;
    double k_mag = 0.0;    // rad/m
    double omega = 0.0;    // rad/s
    double n_phase = 0.0;  // c |k| / w
    double n_group = 0.0;  // d(w n_p)/dw; infinite where n_phase == 0
    double phi = 0.0;      // (2/c^2) w (2 pi)^3 n_g n_p
    bool decoupled = false;  // flat w = omega0 branch of a chi0 == 0 resonance
};

struct DispersionOptions {
    double pole_guard = kDefaultPoleGuard;
    int max_iter = kDefaultMaxIter;
};

// 1 + sum_l chi0_l / (omega0_l^2 - w^2). Negative inside evanescent bands.
// Throws PoleProximity when |w - omega0_l| <= pole_guard * omega0_l for a
// coupled resonance, InvalidArgument when omega <= 0.
double n_phase_squared(const Medium& medium, double omega, double pole_guard = kDefaultPoleGuard);

// sqrt(n_phase_squared); throws EvanescentBand when n^2 <= 0.
double n_phase(const Medium& medium, double omega, double pole_guard = kDefaultPoleGuard);

// Group index d(w n_p)/dw = [1 + sum_l chi0_l omega0_l^2 / (omega0_l^2 - w^2)^2] / n_p.
double n_group(const Medium& medium, double omega, double pole_guard = kDefaultPoleGuard);

// The bracket n_g * n_p = 1 + sum_l chi0_l omega0_l^2 / (omega0_l^2 - w^2)^2.
// No pole guard; the caller owns the frequency.
double group_phase_product(const Medium& medium, double omega);

// Measure factor Phi = (2/c^2) w (2 pi)^3 n_g n_p, from the bracket sum.
double measure_factor(const Medium& medium, double omega);

// On-shell wavenumber w n_p(w) / c.
double wavenumber(const Medium& medium, double omega, double pole_guard = kDefaultPoleGuard);

/*!
 * Builds a medium from Sellmeier coefficients
 *   n^2 = 1 + sum_l a_l lambda^2 / (lambda^2 - l_l^2)
 * with omega0_l = 2 pi c / l_l and chi0_l = a_l omega0_l^2. Wavelengths in
 * micrometres. Throws InvalidCoefficient on mismatched or non-positive input.
 */
Medium sellmeier_to_resonances(std::span<const double> a, std::span<const double> l_um,
                               std::string name = "sellmeier");

// Direct Sellmeier sum n^2(lambda), lambda and l in micrometres.
double sellmeier_n_squared(std::span<const double> a, std::span<const double> l_um, double lambda_um);

// Three-term fused-silica Sellmeier medium.
Medium fused_silica();
std::span<const double> fused_silica_a();
std::span<const double> fused_silica_l_um();

// Two-resonance diamond-like demo medium (Sellmeier a = 0.3306, 4.3356;
// l = 0.175, 0.106 um). Demo parameters, not reference data.
Medium diamond_demo();

/*!
 * All N + 1 roots of c^2 k^2 = w^2 n^2(w), ascending.
 *
 * Each root is bracketed between consecutive poles (the top one by
 * w_max^2 = c^2 k^2 + sum chi0 + omega0_N^2) and polished with safeguarded
 * Newton/bisection, so w_alpha < omega0_(alpha+1) < w_(alpha+1) holds
 * exactly. Throws RootSolverFailure if polishing fails within max_iter.
 */
std::vector<BranchPoint> branch_frequencies(const Medium& medium, double k_mag,
                                            const DispersionOptions& options = {});

// Branch alpha only; same contract as branch_frequencies.
BranchPoint branch_point(const Medium& medium, int alpha, double k_mag, const DispersionOptions& options = {});

// Monic coefficients (lowest order first) of the degree N+1 polynomial in
// x = w^2 whose roots are the squared branch frequencies of the coupled
// resonances: (x - c^2k^2) prod(x - x_l) - x sum_l chi0_l prod_{m != l}(x - x_m).
std::vector<double> dispersion_polynomial(const Medium& medium, double k_mag);

// Closed-form (quadratic / Cardano / Ferrari) branch frequencies for media
// with at most three coupled resonances; ascending. Cross-check path only.
std::vector<double> branch_frequencies_closed_form(const Medium& medium, double k_mag);

// Frequency range [lower, upper) covered by branch alpha of a fully coupled
// medium as |k| runs over [0, inf). upper is +inf for the top branch.
struct BranchInterval {
    double lower = 0.0;
    double upper = 0.0;
};
BranchInterval branch_interval(const Medium& medium, int alpha);

// Branch whose frequency range contains omega; empty inside an evanescent
// band or exactly on a pole.
std::optional<int> branch_of_frequency(const Medium& medium, double omega);

}  // namespace polpair
