#include "polpair/emission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include <fmt/format.h>

#include "polpair/constants.hpp"
#include "polpair/errors.hpp"
#include "polpair/parallel.hpp"

namespace polpair {

namespace {

constexpr double kC = kSpeedOfLight;
constexpr double kC2 = kC * kC;
constexpr double kC4 = kC2 * kC2;

void require_coupled(const Medium& medium)
{
    if (!medium.fully_coupled()) {
        throw InvalidArgument(fmt::format(
            "medium '{}' has a resonance with chi0 = 0; emission needs every resonance coupled", medium.name()));
    }
}

// On-shell measure w n_p / (2c (2 pi)^3), i.e. k^2 dk / Phi per dw.
double on_shell_measure(double omega, double n)
{
    return omega * n / (2.0 * kC * kTwoPiCubed);
}

struct OnShell {
    double omega = 0.0;
    double n = 0.0;
};

OnShell on_shell(const Medium& medium, int alpha, double k_mag, const DispersionOptions& options)
{
    const BranchPoint bp = branch_point(medium, alpha, k_mag, options);
    if (bp.omega > 0.0) {
        n_phase_squared(medium, bp.omega, options.pole_guard);  // pole check
    }
    return {bp.omega, bp.n_phase};
}

void check_polarization(const ModeLabel& m)
{
    if (!m.polarization) {
        throw InvalidArgument("pair_amplitude needs a polarization on both modes");
    }
    const Vec3& z = *m.polarization;
    if (std::abs(z.norm() - 1.0) > 1e-12) {
        throw InvalidArgument("polarization must be a unit vector");
    }
    const double kn = m.k.norm();
    if (kn > 0.0 && std::abs(z.dot(m.k)) > 1e-12 * kn) {
        throw InvalidArgument("polarization must be orthogonal to k");
    }
}

std::vector<double> resonance_factors(const Medium& medium, double w1, double w2)
{
    std::vector<double> f;
    f.reserve(medium.resonance_count());
    for (const auto& r : medium.resonances()) {
        f.push_back(resonance_factor(r, w1, w2));
    }
    return f;
}

double factor_sum(const Medium& medium, double w1, double w2)
{
    double s = 0.0;
    for (const auto& r : medium.resonances()) {
        s += resonance_factor(r, w1, w2);
    }
    return s;
}

Complex weighted_transform(const std::vector<double>& factors, const PerturbationSet& dchi, double omega,
                           const Vec3& k)
{
    Complex s(0.0, 0.0);
    for (std::size_t l = 0; l < factors.size(); ++l) {
        s += factors[l] * dchi.for_resonance(l).value(omega, k);
    }
    return s;
}

std::vector<double> geometric_nodes(double lo, double hi, int count)
{
    std::vector<double> nodes(static_cast<std::size_t>(count));
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < count; ++i) {
        nodes[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i / (count - 1));
    }
    nodes.front() = lo;
    nodes.back() = hi;
    return nodes;
}

// Partner frequency range [lo, hi] on branch beta kept clear of poles and of
// the k = 0 band edge. `hi` is +inf for the top branch.
std::pair<double, double> branch_range(const Medium& medium, int beta, double pole_guard)
{
    const BranchInterval iv = branch_interval(medium, beta);
    const double lo = beta == 0 ? 0.0 : iv.lower * (1.0 + 1e-9);
    const double hi = std::isinf(iv.upper) ? iv.upper : iv.upper * (1.0 - 2.0 * pole_guard);
    return {lo, hi};
}

numerics::QuadratureSpec tightened(numerics::QuadratureSpec q, double factor)
{
    q.rel_tol *= factor;
    q.abs_tol *= factor;
    return q;
}

// integral over dOmega' of integrand(k'), with k' = k_prime_mag times a unit
// vector at polar angle theta' from `axis`.
double angular_integral(const std::function<double(const Vec3&)>& integrand, const Vec3& axis, double k_prime_mag,
                        double theta_scale, const numerics::QuadratureSpec& quad)
{
    const auto basis = transverse_basis(axis);
    std::vector<double> edges = {0.0};
    for (double j : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        if (j * theta_scale < kPi) {
            edges.push_back(j * theta_scale);
        }
    }
    edges.push_back(kPi);
    const auto inner = tightened(quad, 0.1);
    auto polar = [&](double theta) {
        const double st = std::sin(theta);
        const double ct = std::cos(theta);
        auto azimuthal = [&](double phi) {
            const Vec3 dir = axis * ct + (basis[0] * std::cos(phi) + basis[1] * std::sin(phi)) * st;
            return integrand(dir * k_prime_mag);
        };
        return st * numerics::integrate_1d(azimuthal, 0.0, kTwoPi, inner).value;
    };
    return numerics::integrate_piecewise(polar, edges, quad).value;
}

// Contribution of partner branch beta to partner_integral (without 1/c^4).
double partner_branch_integral(const Medium& medium, const PerturbationSet& dchi, double omega, const Vec3& k,
                               int beta, const PartnerIntegralOptions& options)
{
    const double km = k.norm();
    const double scale = options.k_scale > 0.0 ? options.k_scale : 1e-2 * km;
    const Vec3 axis = -(k * (1.0 / km));
    const auto [lo, hi] = branch_range(medium, beta, options.dispersion.pole_guard);

    std::vector<double> edges = {lo};
    for (double j : {-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double kj = km + j * scale;
        if (kj <= 0.0) {
            continue;
        }
        const double w = branch_point(medium, beta, kj, options.dispersion).omega;
        if (w > lo && w < hi) {
            edges.push_back(w);
        }
    }
    const bool top = std::isinf(hi);
    double finite_hi = hi;
    if (top) {
        finite_hi = branch_point(medium, beta, km + 32.0 * scale, options.dispersion).omega;
        finite_hi = std::max(finite_hi, 2.0 * std::max(lo, edges.back()));
    }
    edges.push_back(finite_hi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const auto angular_quad = tightened(options.quad, 0.1);
    auto radial = [&](double wp) {
        const double np = n_phase(medium, wp, options.dispersion.pole_guard);
        const double kpm = wp * np / kC;
        const auto factors = resonance_factors(medium, omega, wp);
        auto integrand = [&](const Vec3& kp) {
            return std::norm(weighted_transform(factors, dchi, omega + wp, k + kp)) * polarization_sum(k, kp);
        };
        return on_shell_measure(wp, np) * angular_integral(integrand, axis, kpm, scale / km, angular_quad);
    };
    double total = numerics::integrate_piecewise(radial, edges, options.quad).value;
    if (top) {
        total += numerics::integrate_semi_infinite(radial, finite_hi, options.quad).value;
    }
    return total;
}

}  // namespace

std::string_view to_string(Provenance p)
{
    switch (p) {
    case Provenance::GeneralN: return "general-N";
    case Provenance::ReducedSingleResonance: return "reduced-single-resonance";
    case Provenance::TravellingRate: return "travelling-rate";
    case Provenance::TimeProfile: return "time-profile";
    }
    return "unknown";
}

std::string_view to_string(ConeRelation r)
{
    switch (r) {
    case ConeRelation::Overlap: return "overlap";
    case ConeRelation::Gap: return "gap";
    case ConeRelation::Degenerate: return "degenerate";
    }
    return "unknown";
}

PerturbationSet::PerturbationSet(SpectralPerturbation shared) : items_{std::move(shared)} {}

PerturbationSet::PerturbationSet(std::vector<SpectralPerturbation> per_resonance) : items_(std::move(per_resonance))
{
    if (items_.empty()) {
        throw InvalidArgument("perturbation set is empty");
    }
}

const SpectralPerturbation& PerturbationSet::for_resonance(std::size_t l) const
{
    if (items_.size() == 1) {
        return items_.front();
    }
    if (l >= items_.size()) {
        throw InvalidArgument(fmt::format("no perturbation for resonance {} ({} given)", l, items_.size()));
    }
    return items_[l];
}

PerturbationSet PerturbationSet::scaled(double s) const
{
    std::vector<SpectralPerturbation> out;
    for (const auto& item : items_) {
        out.push_back(item.scaled(s));
    }
    return PerturbationSet(std::move(out));
}

double resonance_factor(const Resonance& r, double w1, double w2)
{
    const double w0 = r.omega0;
    const double w1w2 = w1 * w2;
    return w1w2 * (w1w2 + w0 * w0) / (((w0 - w1) * (w0 + w1)) * ((w0 - w2) * (w0 + w2)));
}

double polarization_sum(const Vec3& k, const Vec3& k_prime)
{
    const double c = k.dot(k_prime) / (k.norm() * k_prime.norm());
    return 1.0 + c * c;
}

Complex pair_amplitude(const Medium& medium, const PerturbationSet& dchi, const ModeLabel& m1, const ModeLabel& m2,
                       const DispersionOptions& options)
{
    require_coupled(medium);
    check_polarization(m1);
    check_polarization(m2);
    const double w1 = on_shell(medium, m1.branch, m1.k.norm(), options).omega;
    const double w2 = on_shell(medium, m2.branch, m2.k.norm(), options).omega;
    const double overlap = m1.polarization->dot(*m2.polarization);
    if (overlap == 0.0) {
        return {0.0, 0.0};
    }
    const auto factors = resonance_factors(medium, w1, w2);
    return overlap / kC2 * weighted_transform(factors, dchi, w1 + w2, m1.k + m2.k);
}

PairDensity pair_density(const Medium& medium, const PerturbationSet& dchi, const ModeLabel& m1, const ModeLabel& m2,
                         const DispersionOptions& options)
{
    const Complex amp = pair_amplitude(medium, dchi, m1, m2, options);
    const OnShell s1 = on_shell(medium, m1.branch, m1.k.norm(), options);
    const OnShell s2 = on_shell(medium, m2.branch, m2.k.norm(), options);
    PairDensity out;
    out.value = std::norm(amp) * on_shell_measure(s1.omega, s1.n) * on_shell_measure(s2.omega, s2.n);
    out.modes = {m1, m2};
    out.omega = s1.omega;
    out.omega_prime = s2.omega;
    return out;
}

PairDensity pair_density_summed(const Medium& medium, const PerturbationSet& dchi, int alpha, const Vec3& k,
                                int alpha_prime, const Vec3& k_prime, const DispersionOptions& options)
{
    require_coupled(medium);
    const OnShell s1 = on_shell(medium, alpha, k.norm(), options);
    const OnShell s2 = on_shell(medium, alpha_prime, k_prime.norm(), options);
    const auto factors = resonance_factors(medium, s1.omega, s2.omega);
    const std::size_t n = factors.size();
    std::vector<Complex> d(n);
    for (std::size_t l = 0; l < n; ++l) {
        d[l] = dchi.for_resonance(l).value(s1.omega + s2.omega, k + k_prime);
    }
    // Double resonance sum with its l != s cross terms.
    double resonance_sum = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t s = 0; s < n; ++s) {
            resonance_sum += factors[l] * factors[s] * (d[l] * std::conj(d[s])).real();
        }
    }
    PairDensity out;
    out.value = resonance_sum / kC4 * polarization_sum(k, k_prime) * on_shell_measure(s1.omega, s1.n) *
                on_shell_measure(s2.omega, s2.n);
    out.modes = {ModeLabel{alpha, k, std::nullopt}, ModeLabel{alpha_prime, k_prime, std::nullopt}};
    out.omega = s1.omega;
    out.omega_prime = s2.omega;
    return out;
}

PairDensity pair_density_reduced(const Medium& medium, const SpectralPerturbation& dchi, int alpha, const Vec3& k,
                                 int alpha_prime, const Vec3& k_prime, const DispersionOptions& options)
{
    require_coupled(medium);
    if (medium.resonance_count() != 1) {
        throw InvalidArgument("the reduced pair density needs a single-resonance medium");
    }
    const OnShell s1 = on_shell(medium, alpha, k.norm(), options);
    const OnShell s2 = on_shell(medium, alpha_prime, k_prime.norm(), options);
    const double w = s1.omega;
    const double wp = s2.omega;
    const double w0 = medium.resonances().front().omega0;
    const double w0sq = w0 * w0;
    // w^2 w'^2 (w w' + w0^2)^2 / ((w0^2 - w^2)^2 (w0^2 - w'^2)^2), squared
    // last so that the intermediate products stay in range.
    const double root = w * wp * (w * wp + w0sq) / (((w0 - w) * (w0 + w)) * ((w0 - wp) * (w0 + wp)));
    const double two_pi_c = kTwoPi * kC;
    const double prefactor = 1.0 / (4.0 * std::pow(two_pi_c, 6));
    PairDensity out;
    out.value = (w * s1.n) * (wp * s2.n) * (root * root) * polarization_sum(k, k_prime) * prefactor *
                std::norm(dchi.value(w + wp, k + k_prime));
    out.modes = {ModeLabel{alpha, k, std::nullopt}, ModeLabel{alpha_prime, k_prime, std::nullopt}};
    out.omega = w;
    out.omega_prime = wp;
    out.provenance = Provenance::ReducedSingleResonance;
    return out;
}

//---------------------------------------------------------------------------//

IndexModel index_model(const Medium& medium, double pole_guard)
{
    return {[medium, pole_guard](double w) { return n_phase(medium, w, pole_guard); },
            [medium, pole_guard](double w) { return n_group(medium, w, pole_guard); }};
}

std::vector<double> solve_partner_frequencies(const IndexModel& index, double omega, double theta, double theta_prime,
                                              double v, double lo, double hi, int nodes)
{
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
        throw InvalidArgument(fmt::format("partner band must satisfy 0 < lo < hi < inf (got {}, {})", lo, hi));
    }
    if (nodes < 2) {
        throw InvalidArgument("partner scan needs at least two nodes");
    }
    const double constant = omega * (1.0 - v * index.n_phase(omega) * std::cos(theta) / kC);
    const double slope = v * std::cos(theta_prime) / kC;
    auto g = [&](double wp) { return constant + wp * (1.0 - slope * index.n_phase(wp)); };
    auto dg = [&](double wp) { return 1.0 - slope * index.n_group(wp); };

    std::vector<double> roots;
    for (const auto& [a, b] : numerics::scan_sign_changes(g, geometric_nodes(lo, hi, nodes))) {
        const double root = a == b ? a : numerics::polish_root([&](double x) { return std::pair{g(x), dg(x)}; }, a, b);
        const double jac = dg(root);
        if (std::abs(jac) < 1e-12) {
            throw DegenerateJacobian(fmt::format(
                "|dg/dw'| = {:.3e} at w' = {:.17g}: the delta constraint is tangent to the partner branch", jac, root));
        }
        roots.push_back(root);
    }
    return roots;
}

double TravellingRate::total() const
{
    double t = 0.0;
    for (const auto& r : roots) {
        t += r.value;
    }
    return t;
}

namespace {

struct TravellingSetup {
    double n = 0.0;
    Vec3 k;
    double lo = 0.0;
    double hi = 0.0;
};

TravellingSetup travelling_setup(const Medium& medium, const TravellingGaussian& p, double omega, double theta,
                                 int alpha, int alpha_prime, const TravellingOptions& options)
{
    require_coupled(medium);
    validate(Perturbation{p});
    if (!(p.v > 0.0)) {
        throw InvalidArgument("travelling rate needs v > 0");
    }
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw InvalidArgument("emission angles must lie in [0, pi]");
    }
    const double guard = options.dispersion.pole_guard;
    TravellingSetup s;
    s.n = n_phase(medium, omega, guard);
    const auto branch = branch_of_frequency(medium, omega);
    if (!branch || *branch != alpha) {
        throw InvalidArgument(fmt::format("w = {:.17g} rad/s is not on branch {}", omega, alpha));
    }
    if (alpha_prime < 0 || alpha_prime >= static_cast<int>(medium.branch_count())) {
        throw InvalidArgument(fmt::format("partner branch {} out of range", alpha_prime));
    }
    if (options.partner_band) {
        std::tie(s.lo, s.hi) = *options.partner_band;
    } else {
        std::tie(s.lo, s.hi) = branch_range(medium, alpha_prime, guard);
        if (alpha_prime == 0) {
            s.lo = 1e-6 * omega;
        }
        if (std::isinf(s.hi)) {
            s.hi = 100.0 * std::max(omega, medium.resonances().back().omega0);
        }
    }
    s.k = direction(theta, 0.0) * (omega * s.n / kC);
    return s;
}

// Partner frequencies on branch alpha_prime for one polar angle.
std::vector<double> travelling_partners(const Medium& medium, const TravellingGaussian& p, double omega,
                                        double theta, double theta_prime, int alpha_prime,
                                        const TravellingSetup& s, const TravellingOptions& options)
{
    const double guard = options.dispersion.pole_guard;
    const IndexModel index = index_model(medium, guard);
    std::vector<double> out;
    for (double wp : solve_partner_frequencies(index, omega, theta, theta_prime, p.v, s.lo, s.hi,
                                               options.scan_nodes)) {
        const auto partner_branch = branch_of_frequency(medium, wp);
        if (partner_branch && *partner_branch == alpha_prime) {
            out.push_back(wp);  // a user band may straddle branches
        }
    }
    return out;
}

PairDensity travelling_root(const Medium& medium, const TravellingGaussian& p, double omega, const TravellingSetup& s,
                            double wp, double theta_prime, double phi_prime, int alpha, int alpha_prime,
                            double guard)
{
    const double np = n_phase(medium, wp, guard);
    const Vec3 kp = direction(theta_prime, phi_prime) * (wp * np / kC);
    const Vec3 K = s.k + kp;
    const double f = factor_sum(medium, omega, wp);
    const double amplitude = p.dchi0 * p.sigma_z * p.sigma_rho * p.sigma_rho;
    const double envelope =
        std::exp(-p.sigma_z * p.sigma_z * K.z * K.z - p.sigma_rho * p.sigma_rho * (K.x * K.x + K.y * K.y));
    const double weight = 1.0 / std::abs(1.0 - p.v * std::cos(theta_prime) * n_group(medium, wp, guard) / kC);

    PairDensity d;
    d.value = polarization_sum(s.k, kp) * f * f * amplitude * amplitude * envelope * omega * s.n * wp * np /
              (16.0 * kPi * kPi * kC4 * kC2) * weight;
    d.modes = {ModeLabel{alpha, s.k, std::nullopt}, ModeLabel{alpha_prime, kp, std::nullopt}};
    d.omega = omega;
    d.omega_prime = wp;
    d.kinematic_weight = weight;
    d.provenance = Provenance::TravellingRate;
    return d;
}

}  // namespace

TravellingRate travelling_rate(const Medium& medium, const TravellingGaussian& p, double omega, double theta,
                               double theta_prime, int alpha, int alpha_prime, const TravellingOptions& options)
{
    const TravellingSetup s = travelling_setup(medium, p, omega, theta, alpha, alpha_prime, options);
    if (!(theta_prime >= 0.0 && theta_prime <= kPi)) {
        throw InvalidArgument("emission angles must lie in [0, pi]");
    }
    TravellingRate out;
    for (double wp : travelling_partners(medium, p, omega, theta, theta_prime, alpha_prime, s, options)) {
        out.roots.push_back(travelling_root(medium, p, omega, s, wp, theta_prime, options.delta_phi, alpha,
                                            alpha_prime, options.dispersion.pole_guard));
    }
    return out;
}

double travelling_rate_over_partner_angles(const Medium& medium, const TravellingGaussian& p, double omega,
                                           double theta, int alpha, int alpha_prime, const TravellingOptions& options,
                                           const numerics::QuadratureSpec& quad)
{
    const TravellingSetup s = travelling_setup(medium, p, omega, theta, alpha, alpha_prime, options);
    const double guard = options.dispersion.pole_guard;
    numerics::QuadratureSpec inner = quad;
    inner.rel_tol *= 0.1;
    auto polar = [&](double thp) {
        std::vector<double> roots;
        try {
            roots = travelling_partners(medium, p, omega, theta, thp, alpha_prime, s, options);
        } catch (const DegenerateJacobian&) {
            return 0.0;  // isolated tangency; measure zero
        }
        double sum = 0.0;
        for (double wp : roots) {
            // k sits at azimuth 0, so the integrand is even in phi'.
            auto azimuthal = [&](double phi) {
                return travelling_root(medium, p, omega, s, wp, thp, phi, alpha, alpha_prime, guard).value;
            };
            sum += 2.0 * numerics::integrate_1d(azimuthal, 0.0, kPi, inner).value;
        }
        return sum * std::sin(thp);
    };
    std::vector<double> edges;
    for (int i = 0; i <= 16; ++i) {
        edges.push_back(kPi * i / 16.0);
    }
    return numerics::integrate_piecewise(polar, edges, quad).value;
}

ConeReport cone_report(const Medium& medium, double v, double omega, double omega_prime, double pole_guard)
{
    if (!(v > 0.0)) {
        throw InvalidArgument("cone report needs v > 0");
    }
    ConeReport r;
    r.v = v;
    r.omega = omega;
    r.omega_prime = omega_prime;
    const double x = kC / (v * n_phase(medium, omega, pole_guard));
    const double xp = kC / (v * n_phase(medium, omega_prime, pole_guard));
    r.threshold_ok = x <= 1.0;
    r.threshold_ok_prime = xp <= 1.0;
    if (r.threshold_ok) {
        r.theta_c = std::acos(x);
    }
    if (r.threshold_ok_prime) {
        r.theta_c_prime = std::acos(xp);
    }
    if (r.theta_c && r.theta_c_prime) {
        const double diff = *r.theta_c - *r.theta_c_prime;
        r.relation = std::abs(diff) <= 1e-12 ? ConeRelation::Degenerate
                     : diff > 0.0            ? ConeRelation::Overlap
                                             : ConeRelation::Gap;
    }
    return r;
}

//---------------------------------------------------------------------------//

double partner_integral(const Medium& medium, const PerturbationSet& dchi, int alpha, const Vec3& k,
                        const PartnerIntegralOptions& options)
{
    require_coupled(medium);
    options.quad.validate();
    const double km = k.norm();
    if (!(km > 0.0)) {
        throw InvalidArgument("partner integral needs |k| > 0");
    }
    const double omega = on_shell(medium, alpha, km, options.dispersion).omega;
    double total = 0.0;
    for (int beta = 0; beta < static_cast<int>(medium.branch_count()); ++beta) {
        total += partner_branch_integral(medium, dchi, omega, k, beta, options);
    }
    return total / kC4;
}

double integrated_photon_number(const Medium& medium, const PerturbationSet& dchi, int alpha, const Vec3& k_direction,
                                double omega_lo, double omega_hi, const PartnerIntegralOptions& options)
{
    require_coupled(medium);
    if (!(omega_lo > 0.0 && omega_hi > omega_lo)) {
        throw InvalidArgument("frequency band must satisfy 0 < lo < hi");
    }
    const auto lo_branch = branch_of_frequency(medium, omega_lo);
    const auto hi_branch = branch_of_frequency(medium, omega_hi);
    if (!lo_branch || !hi_branch || *lo_branch != alpha || *hi_branch != alpha) {
        throw InvalidArgument(fmt::format("band [{:.6g}, {:.6g}] rad/s is not inside branch {}", omega_lo, omega_hi,
                                          alpha));
    }
    const double guard = options.dispersion.pole_guard;
    n_phase_squared(medium, omega_lo, guard);
    n_phase_squared(medium, omega_hi, guard);
    const Vec3 dir = k_direction.normalized();
    PartnerIntegralOptions inner = options;
    inner.quad = tightened(options.quad, 0.1);
    auto integrand = [&](double w) {
        const double n = n_phase(medium, w, guard);
        return partner_integral(medium, dchi, alpha, dir * (w * n / kC), inner) * on_shell_measure(w, n);
    };
    return numerics::integrate_1d(integrand, omega_lo, omega_hi, options.quad).value;
}

//---------------------------------------------------------------------------//

namespace {

void check_time_support(const SpectralPerturbation& dchi, const TimeProfileOptions& options)
{
    if (dchi.support == SpatialSupport::Full) {
        throw InvalidArgument("time-profile emission needs a homogeneous or enveloped time profile");
    }
    if (dchi.support == SpatialSupport::Homogeneous && !(options.volume > 0.0)) {
        throw InvalidArgument("a homogeneous time profile needs a quantization volume > 0");
    }
}

double squared_delta_factor(const TimeProfileOptions& options)
{
    if (!(options.observation_time > 0.0)) {
        throw InvalidArgument("delta lines in the time transform need an observation time T_obs > 0");
    }
    return options.observation_time / kTwoPi;
}

}  // namespace

PairDensity time_profile_pair_density(const Medium& medium, const SpectralPerturbation& dchi, int alpha,
                                      const Vec3& k, int alpha_prime, const Vec3& k_prime,
                                      const TimeProfileOptions& options, const DispersionOptions& dispersion)
{
    require_coupled(medium);
    check_time_support(dchi, options);
    PairDensity out;
    out.modes = {ModeLabel{alpha, k, std::nullopt}, ModeLabel{alpha_prime, k_prime, std::nullopt}};
    out.provenance = Provenance::TimeProfile;
    const OnShell s1 = on_shell(medium, alpha, k.norm(), dispersion);
    const OnShell s2 = on_shell(medium, alpha_prime, k_prime.norm(), dispersion);
    out.omega = s1.omega;
    out.omega_prime = s2.omega;

    const Vec3 K = k + k_prime;
    double spatial = 0.0;
    if (dchi.support == SpatialSupport::Homogeneous) {
        if (K.norm() > 1e-12 * std::max(k.norm(), k_prime.norm())) {
            return out;  // not back to back
        }
        spatial = options.volume / kTwoPiCubed;
    } else {
        const double g = dchi.gamma_hat(K);
        spatial = g * g;
    }
    const double f = factor_sum(medium, s1.omega, s2.omega);
    out.value = f * f * std::norm(dchi.time_part(s1.omega + s2.omega)) * spatial / kC4 *
                polarization_sum(k, k_prime) * on_shell_measure(s1.omega, s1.n) * on_shell_measure(s2.omega, s2.n);
    return out;
}

TimeProfileSpectrum time_profile_spectrum(const Medium& medium, const SpectralPerturbation& dchi,
                                          const std::vector<double>& omega_grid, const TimeProfileOptions& options,
                                          const DispersionOptions& dispersion)
{
    require_coupled(medium);
    check_time_support(dchi, options);
    if (omega_grid.empty() || !(omega_grid.front() > 0.0)) {
        throw InvalidArgument("frequency grid must be non-empty and positive");
    }
    for (std::size_t i = 1; i < omega_grid.size(); ++i) {
        if (!(omega_grid[i] > omega_grid[i - 1])) {
            throw InvalidArgument("frequency grid must be strictly increasing");
        }
    }
    const int branches = static_cast<int>(medium.branch_count());
    const double guard = dispersion.pole_guard;

    std::vector<double> partner_axis;
    for (int b = 0; b < branches; ++b) {
        partner_axis.push_back(b);
    }
    TimeProfileSpectrum out;
    out.grid = make_grid("dN/(domega dOmega)", "s/sr",
                         {GridAxis{"omega", "rad/s", omega_grid}, GridAxis{"partner_branch", "index", partner_axis}});
    out.grid.metadata["provenance"] = std::string(to_string(Provenance::TimeProfile));
    out.grid.metadata["support"] = dchi.support == SpatialSupport::Homogeneous ? "homogeneous" : "envelope";

    // Cell edges at midpoints; the outer cells extend by half a spacing.
    const std::size_t m = omega_grid.size();
    std::vector<double> edges(m + 1);
    for (std::size_t i = 1; i < m; ++i) {
        edges[i] = 0.5 * (omega_grid[i - 1] + omega_grid[i]);
    }
    const double first_step = m > 1 ? omega_grid[1] - omega_grid[0] : 0.1 * omega_grid[0];
    const double last_step = m > 1 ? omega_grid[m - 1] - omega_grid[m - 2] : 0.1 * omega_grid[0];
    edges[0] = std::max(0.5 * omega_grid[0], omega_grid[0] - 0.5 * first_step);
    edges[m] = omega_grid[m - 1] + 0.5 * last_step;

    // Regular part of the time transform, one grid point per task.
    parallel_for(m, options.threads, [&](std::size_t i) {
        const double w = omega_grid[i];
        const auto alpha = branch_of_frequency(medium, w);
        if (!alpha) {
            return;
        }
        const double n = n_phase(medium, w, guard);
        const double km = w * n / kC;
        const Vec3 k{0.0, 0.0, km};
        for (int beta = 0; beta < branches; ++beta) {
            double value = 0.0;
            if (dchi.support == SpatialSupport::Homogeneous) {
                const OnShell partner = on_shell(medium, beta, km, dispersion);
                const double f = factor_sum(medium, w, partner.omega);
                value = 2.0 / kC4 * f * f * std::norm(dchi.time_part(w + partner.omega)) * options.volume /
                        kTwoPiCubed / measure_factor(medium, partner.omega) * on_shell_measure(w, n);
            } else {
                value = partner_branch_integral(medium, PerturbationSet(dchi), w, k, beta, options.partner) / kC4 *
                        on_shell_measure(w, n);
            }
            out.grid.at(i, static_cast<std::size_t>(beta)) = value;
        }
    });

    // Delta lines. The regular part vanishes on every line of the analytic
    // profiles (sinusoid) or the line sits at w + w' = 0 (tanh), so there are
    // no regular x delta cross terms.
    for (const auto& line : dchi.delta_terms) {
        const double a = line.frequency;
        if (!(a > 0.0)) {
            continue;
        }
        const double lines_factor = squared_delta_factor(options) * std::norm(line.weight);
        if (dchi.support == SpatialSupport::Envelope) {
            // w' = a - w is fixed; only the partner direction is integrated.
            for (std::size_t i = 0; i < m; ++i) {
                const double w = omega_grid[i];
                const double wp = a - w;
                const auto alpha = branch_of_frequency(medium, w);
                const auto beta = wp > 0.0 ? branch_of_frequency(medium, wp) : std::nullopt;
                if (!alpha || !beta) {
                    continue;
                }
                const double n = n_phase(medium, w, guard);
                const double np = n_phase(medium, wp, guard);
                const Vec3 k{0.0, 0.0, w * n / kC};
                const double f = factor_sum(medium, w, wp);
                auto integrand = [&](const Vec3& kp) {
                    const double g = dchi.gamma_hat(k + kp);
                    return g * g * polarization_sum(k, kp);
                };
                const double scale = options.partner.k_scale > 0.0 ? options.partner.k_scale : 1e-2 * k.z;
                const double angular = angular_integral(integrand, Vec3{0.0, 0.0, -1.0}, wp * np / kC, scale / k.z,
                                                        options.partner.quad);
                out.grid.at(i, static_cast<std::size_t>(*beta)) +=
                    f * f * lines_factor / kC4 * angular * on_shell_measure(wp, np) * on_shell_measure(w, n);
            }
            continue;
        }
        for (int alpha = 0; alpha < branches; ++alpha) {
            const auto [branch_lo, branch_hi] = branch_range(medium, alpha, guard);
            const double lo = std::max(branch_lo, edges.front());
            const double hi = std::min(branch_hi, edges.back());
            if (!(hi > lo)) {
                continue;
            }
            for (int beta = 0; beta < branches; ++beta) {
                auto partner_of = [&](double w) {
                    return on_shell(medium, beta, w * n_phase(medium, w, guard) / kC, dispersion);
                };
                auto h = [&](double w) {
                    const OnShell p = partner_of(w);
                    const double dh = 1.0 + n_group(medium, w, guard) / n_group(medium, p.omega, guard);
                    return std::pair{w + p.omega - a, dh};
                };
                if ((h(lo).first > 0.0) == (h(hi).first > 0.0)) {
                    continue;
                }
                const double w = numerics::polish_root(h, lo, hi, {0.0, dispersion.max_iter});
                const double n = n_phase(medium, w, guard);
                const OnShell partner = partner_of(w);
                const double f = factor_sum(medium, w, partner.omega);
                const double slope = h(w).second;

                SpectralLine sl;
                sl.branch = alpha;
                sl.partner_branch = beta;
                sl.delta_frequency = a;
                sl.omega = w;
                sl.omega_prime = partner.omega;
                sl.k_mag = w * n / kC;
                sl.residual = std::abs(w + partner.omega - a) / a;
                sl.weight = 2.0 / kC4 * f * f * lines_factor * options.volume / kTwoPiCubed /
                            measure_factor(medium, partner.omega) * on_shell_measure(w, n) / std::abs(slope);
                const auto cell = static_cast<std::size_t>(
                    std::upper_bound(edges.begin(), edges.end(), w) - edges.begin() - 1);
                if (cell < m) {
                    out.grid.at(cell, static_cast<std::size_t>(beta)) += sl.weight / (edges[cell + 1] - edges[cell]);
                }
                out.lines.push_back(sl);
            }
        }
    }
    out.grid.validate();
    return out;
}

}  // namespace polpair
