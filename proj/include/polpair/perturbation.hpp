#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polpair/medium.hpp"
#include "polpair/numerics.hpp"
#include "polpair/vec3.hpp"

namespace polpair {

using Complex = std::complex<double>;

// Gaussian blob dchi0 exp(-rho^2/2 sigma_rho^2) exp(-(z - v t)^2/2 sigma_z^2),
// switched on for t in [-T, T].
struct TravellingGaussian {
    double dchi0 = 0.0;      // rad^2/s^2
    double sigma_rho = 0.0;  // m
    double sigma_z = 0.0;    // m
    double v = 0.0;          // m/s
    double T = 0.0;          // s
};

// eta exp(-a t^2)
struct TimeGaussian {
    double eta = 0.0;  // rad^2/s^2
    double a = 0.0;    // 1/s^2
};

// eta (1 + tanh(a t))
struct TimeTanhStep {
    double eta = 0.0;  // rad^2/s^2
    double a = 0.0;    // 1/s
};

// eta (1 + sin(a t))
struct TimeSinusoid {
    double eta = 0.0;  // rad^2/s^2
    double a = 0.0;    // rad/s
};

using TimeProfile = std::variant<TimeGaussian, TimeTanhStep, TimeSinusoid>;

// |gamma_hat(k)| of a spatial envelope gamma(x), k in rad/m.
using SpatialTransform = std::function<double(const Vec3&)>;

// g(t) gamma(x): a time profile with finite spatial support.
struct TimeProfileWithEnvelope {
    TimeProfile time_part;
    SpatialTransform gamma_hat;
};

// Arbitrary time dependence sampled on a uniform grid, optionally with a
// spatial envelope. Without one the profile is homogeneous in space.
struct SampledProfile {
    numerics::SampledSignal signal;
    std::optional<SpatialTransform> gamma_hat;
};

using Perturbation = std::variant<TravellingGaussian, TimeGaussian, TimeTanhStep, TimeSinusoid,
                                  TimeProfileWithEnvelope, SampledProfile>;

// Throws InvalidArgument when a scale parameter is out of range.
void validate(const Perturbation& p);

// Human-readable warnings for physically questionable but valid input, e.g.
// a time-profile amplitude eta above 0.1 chi0 of the lowest resonance.
std::vector<std::string> perturbation_warnings(const Perturbation& p, const Medium& medium);

// True for every profile without explicit space dependence.
bool is_time_profile(const Perturbation& p);

enum class SpectralKind { Regular, DeltaComb };

// How the transform depends on k.
//   Full:        regular_part(w, k) is the whole transform.
//   Homogeneous: transform is delta^3(k) * regular_part(w, .).
//   Envelope:    transform is regular_part(w, .) * gamma_hat(k).
enum class SpatialSupport { Full, Homogeneous, Envelope };

struct DeltaTerm {
    double frequency = 0.0;  // rad/s
    Complex weight;          // coefficient of delta(w - frequency)
};

/*!
 * Space-time transform integral d^3x dt exp(i w t - i k.x) dchi(x, t).
 *
 * Dirac deltas in w are kept symbolically in delta_terms; regular_part holds
 * everything else. For Homogeneous and Envelope support regular_part ignores
 * its k argument.
 */
struct SpectralPerturbation {
    SpectralKind kind = SpectralKind::Regular;
    SpatialSupport support = SpatialSupport::Full;
    std::function<Complex(double, const Vec3&)> regular_part;
    std::vector<DeltaTerm> delta_terms;
    SpatialTransform gamma_hat;  // Envelope only

    // Pointwise value of the regular part including any spatial envelope.
    // Throws InvalidArgument for Homogeneous support, which has no pointwise
    // value in k.
    Complex value(double omega, const Vec3& k) const;

    // Time part alone (regular terms only).
    Complex time_part(double omega) const;

    // Every transform scaled by s, deltas included.
    SpectralPerturbation scaled(double s) const;
};

SpectralPerturbation fourier_transform(const Perturbation& p);

// Identically zero transform with Full support.
SpectralPerturbation zero_spectrum();

// f_T = integral_{-T}^{T} exp(i (w - kz v) t) dt = 2 sin(u T) / u, u = w - kz v.
double f_T(double omega, double kz, double v, double T);

struct FTSquaredLimit {
    double exact = 0.0;         // |f_T|^2
    double delta_weight = 0.0;  // W in |f_T|^2 ~ W delta(w - kz v); only meaningful under integration
};

// The large-T weight is 4 pi T, the full integral of |f_T|^2 over w.
FTSquaredLimit f_T_squared_limit(double omega, double kz, double v, double T);

//---------------------------------------------------------------------------//
// Analytic versus FFT comparison of time-profile transforms
//---------------------------------------------------------------------------//

struct FtCheckOptions {
    std::size_t samples = 0;   // power of two; 0 picks a default per profile
    double window = 0.0;       // half width in s; 0 picks a default per profile
    std::size_t table_rows = 41;
};

struct FtCheckRow {
    double omega = 0.0;
    Complex analytic;
    Complex numeric;
    double rel_dev = 0.0;
};

struct FtCheckReport {
    std::string profile;
    std::vector<FtCheckRow> rows;       // subsample of the compared bins
    double max_rel_dev = 0.0;           // over every compared bin
    std::size_t compared_bins = 0;
    std::vector<DeltaTerm> delta_terms;  // analytic delta lines
    // Gaussian only: largest relative deviation of the eta pi / sqrt(w)
    // prefactor form from the validated transform over the compared band.
    std::optional<double> alt_prefactor_deviation;
    std::string note;
};

/*!
 * Compares the analytic transform of a time profile against
 * fourier_transform_numeric.
 *
 * Gaussian: bins with |w| <= 6 sqrt(a). Tanh step: eta erf(a t) is
 * subtracted before the FFT so the sampled signal decays at both window
 * edges, and its transform (2 i eta / w) exp(-w^2 / 4a^2) is added back;
 * bins with a/20 <= |w| <= 6a. Sinusoid: no regular part, only the delta
 * lines are reported. Throws WindowTooShort if the window is too narrow.
 */
FtCheckReport ft_check(const Perturbation& p, const FtCheckOptions& options = {});

}  // namespace polpair
