#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "polpair/medium.hpp"
#include "polpair/numerics.hpp"
#include "polpair/perturbation.hpp"
#include "polpair/spectrum_grid.hpp"
#include "polpair/vec3.hpp"

namespace polpair {

// One polariton mode: branch alpha, wave vector k and an optional
// polarization (absent means summed over both transverse polarizations).
struct ModeLabel {
    int branch = 0;
    Vec3 k;
    std::optional<Vec3> polarization;
};

enum class Provenance { GeneralN, ReducedSingleResonance, TravellingRate, TimeProfile };

std::string_view to_string(Provenance p);

/*!
 * Differential pair number per d(omega) dOmega d(omega') dOmega' for one
 * mode pair (per d(omega) dOmega dOmega' per unit time for travelling rates,
 * where the delta in omega' has been integrated out with kinematic_weight).
 */
struct PairDensity {
    double value = 0.0;
    std::array<ModeLabel, 2> modes;
    double omega = 0.0;        // rad/s
    double omega_prime = 0.0;  // rad/s
    double kinematic_weight = 1.0;
    Provenance provenance = Provenance::GeneralN;
};

// Spectral perturbation per resonance: either one transform shared by every
// resonance or one per resonance (in the medium's sorted order).
class PerturbationSet {
public:
    PerturbationSet(SpectralPerturbation shared);  // NOLINT(google-explicit-constructor)
    explicit PerturbationSet(std::vector<SpectralPerturbation> per_resonance);

    const SpectralPerturbation& for_resonance(std::size_t l) const;
    std::size_t size() const { return items_.size(); }
    PerturbationSet scaled(double s) const;

private:
    std::vector<SpectralPerturbation> items_;
};

// w1 w2 (w1 w2 + w0^2) / ((w0^2 - w1^2)(w0^2 - w2^2)).
double resonance_factor(const Resonance& r, double w1, double w2);

// 1 + (k.k')^2 / (k^2 k'^2): the sum over both polarizations of each photon
// of (zeta . zeta')^2.
double polarization_sum(const Vec3& k, const Vec3& k_prime);

/*!
 * First-order pair amplitude
 *   (1/c^2) (zeta . xi) sum_l F_l(w1, w2) dchi_l(w1 + w2, k1 + k2),
 * F_l = resonance_factor, wi = w_{alpha_i}(|ki|). Both modes need a unit
 * polarization orthogonal to k. Throws PoleProximity if a mode sits on a
 * pole and InvalidArgument for media with decoupled resonances.
 */
Complex pair_amplitude(const Medium& medium, const PerturbationSet& dchi, const ModeLabel& m1, const ModeLabel& m2,
                       const DispersionOptions& options = {});

// |amplitude|^2 times the two on-shell measures w n_p / (2c (2 pi)^3).
PairDensity pair_density(const Medium& medium, const PerturbationSet& dchi, const ModeLabel& m1, const ModeLabel& m2,
                         const DispersionOptions& options = {});

/*!
 * Polarization-summed pair density
 *   (1/c^4) sum_{l,s} F_l F_s dchi_l dchi_s^* [1 + (k.k')^2/(k^2 k'^2)]
 *   * w n_p(w) / (2c (2 pi)^3) * w' n_p(w') / (2c (2 pi)^3).
 */
PairDensity pair_density_summed(const Medium& medium, const PerturbationSet& dchi, int alpha, const Vec3& k,
                                int alpha_prime, const Vec3& k_prime, const DispersionOptions& options = {});

// Closed single-resonance form of pair_density_summed, prefactor 1/(4 (2 pi c)^6).
// Requires a medium with exactly one resonance.
PairDensity pair_density_reduced(const Medium& medium, const SpectralPerturbation& dchi, int alpha, const Vec3& k,
                                 int alpha_prime, const Vec3& k_prime, const DispersionOptions& options = {});

//---------------------------------------------------------------------------//
// Travelling Gaussian perturbation
//---------------------------------------------------------------------------//

// Phase and group index as functions of frequency. The medium provides one;
// tests substitute a constant index.
struct IndexModel {
    std::function<double(double)> n_phase;
    std::function<double(double)> n_group;
};

IndexModel index_model(const Medium& medium, double pole_guard = kDefaultPoleGuard);

/*!
 * Roots w' in [lo, hi] of
 *   g(w') = w + w' - v k_z - v k'_z,   k_z = w n(w) cos(theta) / c,
 *   k'_z = w' n(w') cos(theta') / c,
 * located by a geometric scan with `nodes` points and safeguarded Newton
 * polishing. dg/dw' = 1 - v cos(theta') n_g(w') / c. Throws
 * DegenerateJacobian if |dg/dw'| < 1e-12 at a root.
 */
std::vector<double> solve_partner_frequencies(const IndexModel& index, double omega, double theta, double theta_prime,
                                              double v, double lo, double hi, int nodes = 256);

struct TravellingOptions {
    double delta_phi = kPi;  // azimuth of k' relative to k (k sits at azimuth 0)
    // Partner frequency search range; defaults to the whole partner branch
    // (top branch capped at 100 max(w, omega0_N), branch 0 starting at 1e-6 w).
    std::optional<std::pair<double, double>> partner_band;
    int scan_nodes = 256;
    DispersionOptions dispersion;
};

struct TravellingRate {
    std::vector<PairDensity> roots;  // one per partner frequency, ascending w'
    double total() const;
};

/*!
 * Pair rate dN/(2T) per d(omega) dOmega dOmega' for the travelling Gaussian
 * in the large-T limit, where |f_T|^2 -> 4 pi T delta(w + w' - v (k_z + k'_z)).
 * For each root w' of the delta argument on branch alpha_prime the value is
 *   [1 + (k.k')^2/(k^2 k'^2)] (sum_l F_l)^2 dchi0^2 sigma_z^2 sigma_rho^4
 *   exp(-sigma_z^2 K_z^2 - sigma_rho^2 K_rho^2) w n w' n' / (16 pi^2 c^6)
 *   / |1 - v cos(theta') n_g(w') / c|,  K = k + k'.
 * An empty root list means no kinematically allowed partner.
 */
TravellingRate travelling_rate(const Medium& medium, const TravellingGaussian& p, double omega, double theta,
                               double theta_prime, int alpha, int alpha_prime, const TravellingOptions& options = {});

/*!
 * travelling_rate summed over roots and integrated over the partner
 * direction: dN/(2T) per d(omega) dOmega. Adaptive quadrature over theta'
 * (16 initial panels on [0, pi]) and phi'; roots depend on theta' only.
 */
double travelling_rate_over_partner_angles(const Medium& medium, const TravellingGaussian& p, double omega,
                                           double theta, int alpha, int alpha_prime,
                                           const TravellingOptions& options = {},
                                           const numerics::QuadratureSpec& quad = {1e-4, 0.0, 20'000});

enum class ConeRelation { Overlap, Gap, Degenerate };

std::string_view to_string(ConeRelation r);

struct ConeReport {
    double v = 0.0;
    double omega = 0.0;
    double omega_prime = 0.0;
    bool threshold_ok = false;        // c / (v n(w)) <= 1
    bool threshold_ok_prime = false;  // c / (v n(w')) <= 1
    std::optional<double> theta_c;        // arccos(c / (v n(w)))
    std::optional<double> theta_c_prime;  // arccos(c / (v n(w')))
    std::optional<ConeRelation> relation;  // needs both angles; Degenerate within 1e-12 rad
};

ConeReport cone_report(const Medium& medium, double v, double omega, double omega_prime,
                       double pole_guard = kDefaultPoleGuard);

//---------------------------------------------------------------------------//
// Integrals over the partner mode
//---------------------------------------------------------------------------//

struct PartnerIntegralOptions {
    numerics::QuadratureSpec quad{1e-6, 0.0, 20'000};
    // Momentum-transfer scale |k + k'| over which the perturbation varies,
    // used to place the initial panels around the back-to-back partner.
    // 0 means 1e-2 |k|.
    double k_scale = 0.0;
    DispersionOptions dispersion;
};

/*!
 * Partner integral of the polarization-summed density:
 *   (1/c^4) sum_beta integral d^3k'/Phi_beta |sum_l F_l dchi_l(w + w', k + k')|^2
 *   [1 + (k.k')^2/(k^2 k'^2)],
 * with d^3k'/Phi_beta = w' n(w') / (2c (2 pi)^3) dw' dOmega'. Nested adaptive
 * quadrature over w' (along each branch), the polar angle around -k and the
 * azimuth. Requires a transform with a pointwise value (Full or Envelope).
 */
double partner_integral(const Medium& medium, const PerturbationSet& dchi, int alpha, const Vec3& k,
                        const PartnerIntegralOptions& options = {});

/*!
 * Expected number of branch-alpha polaritons per steradian around
 * k_direction with frequency in [omega_lo, omega_hi]:
 *   integral dw partner_integral(w) w n(w) / (2c (2 pi)^3).
 * The band must lie inside branch alpha.
 */
double integrated_photon_number(const Medium& medium, const PerturbationSet& dchi, int alpha, const Vec3& k_direction,
                                double omega_lo, double omega_hi, const PartnerIntegralOptions& options = {});

//---------------------------------------------------------------------------//
// Purely time-dependent perturbations
//---------------------------------------------------------------------------//

struct TimeProfileOptions {
    double volume = 0.0;            // m^3; (2 pi)^3 delta^3(0) -> volume
    double observation_time = 0.0;  // s; delta(w - a)^2 -> (T_obs / 2 pi) delta(w - a)
    unsigned threads = 1;
    PartnerIntegralOptions partner;  // envelope profiles only
};

/*!
 * Pointwise pair density for a time profile shared by every resonance.
 * Homogeneous support: the coefficient of delta^3(k + k') with
 * delta^3(0) -> volume / (2 pi)^3, so the value is zero unless k' = -k
 * (to 1e-12 |k|). Envelope support: |gamma_hat(k + k')|^2 in place of both
 * deltas. Delta lines of the time part are not sampled pointwise.
 */
PairDensity time_profile_pair_density(const Medium& medium, const SpectralPerturbation& dchi, int alpha,
                                      const Vec3& k, int alpha_prime, const Vec3& k_prime,
                                      const TimeProfileOptions& options,
                                      const DispersionOptions& dispersion = {});

// A delta line of the time transform met by a partner pair.
struct SpectralLine {
    int branch = 0;
    int partner_branch = 0;
    double delta_frequency = 0.0;  // a in delta(w - a)
    double omega = 0.0;
    double omega_prime = 0.0;
    double k_mag = 0.0;
    double residual = 0.0;  // |w + w' - a| / a
    double weight = 0.0;    // dN/dOmega carried by the line
};

struct TimeProfileSpectrum {
    SpectrumGrid grid;  // dN/(dw dOmega) over omega x partner branch
    std::vector<SpectralLine> lines;
};

/*!
 * Emission spectrum dN/(dw dOmega) of a time profile over an increasing
 * omega grid, one column per partner branch.
 *
 * Homogeneous support: pairs are back to back, k' = -k, and each grid
 * point is
 *   (2/c^4) (sum_l F_l)^2 |g(w + w')|^2 volume / (2 pi)^3 / Phi(w')
 *   * w n / (2c (2 pi)^3).
 * Delta lines a of the time part are solved exactly for w + w_beta(k(w)) = a
 * and deposit weight / cell width in the grid cell holding the root (cells
 * are bounded by midpoints between grid points). Envelope support integrates
 * the partner numerically; delta lines then fix w' = a - w.
 */
TimeProfileSpectrum time_profile_spectrum(const Medium& medium, const SpectralPerturbation& dchi,
                                          const std::vector<double>& omega_grid, const TimeProfileOptions& options,
                                          const DispersionOptions& dispersion = {});

}  // namespace polpair
