#include "polpair/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "polpair/constants.hpp"
#include "polpair/errors.hpp"

namespace polpair {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

void require_positive(double value, const char* what)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidArgument(fmt::format("{} must be positive and finite (got {})", what, value));
    }
}

void require_finite(double value, const char* what)
{
    if (!std::isfinite(value)) {
        throw InvalidArgument(fmt::format("{} must be finite (got {})", what, value));
    }
}

void validate_time(const TimeProfile& p)
{
    std::visit([](const auto& q) {
        require_finite(q.eta, "eta");
        require_positive(q.a, "a");
    }, p);
}

double time_eta(const TimeProfile& p)
{
    return std::visit([](const auto& q) { return q.eta; }, p);
}

// Regular part and delta lines of the time transform of one analytic profile.
struct TimeSpectrum {
    std::function<Complex(double)> regular;
    std::vector<DeltaTerm> deltas;
};

TimeSpectrum time_spectrum(const TimeProfile& profile)
{
    return std::visit(Overloaded{
        [](const TimeGaussian& g) {
            const double scale = g.eta * std::sqrt(kPi / g.a);
            const double a = g.a;
            return TimeSpectrum{[scale, a](double w) { return Complex(scale * std::exp(-w * w / (4.0 * a)), 0.0); },
                                {}};
        },
        [](const TimeTanhStep& s) {
            const double eta = s.eta;
            const double a = s.a;
            // Principal value: the regular part is odd, so it is set to 0 at w = 0.
            auto regular = [eta, a](double w) {
                if (w == 0.0) {
                    return Complex(0.0, 0.0);
                }
                return Complex(0.0, kPi * eta / (a * std::sinh(kPi * w / (2.0 * a))));
            };
            return TimeSpectrum{regular, {{0.0, Complex(kTwoPi * eta, 0.0)}}};
        },
        [](const TimeSinusoid& s) {
            return TimeSpectrum{[](double) { return Complex(0.0, 0.0); },
                                {{-s.a, Complex(0.0, -kPi * s.eta)},
                                 {0.0, Complex(kTwoPi * s.eta, 0.0)},
                                 {s.a, Complex(0.0, kPi * s.eta)}}};
        },
    }, profile);
}

SpectralPerturbation from_time(const TimeSpectrum& ts, SpatialSupport support, SpatialTransform gamma_hat)
{
    SpectralPerturbation out;
    out.kind = ts.deltas.empty() ? SpectralKind::Regular : SpectralKind::DeltaComb;
    out.support = support;
    auto regular = ts.regular;
    out.regular_part = [regular](double w, const Vec3&) { return regular(w); };
    out.delta_terms = ts.deltas;
    out.gamma_hat = std::move(gamma_hat);
    return out;
}

}  // namespace

void validate(const Perturbation& p)
{
    std::visit(Overloaded{
        [](const TravellingGaussian& g) {
            require_finite(g.dchi0, "dchi0");
            require_positive(g.sigma_rho, "sigma_rho");
            require_positive(g.sigma_z, "sigma_z");
            require_positive(g.T, "T");
            if (!(g.v >= 0.0) || !std::isfinite(g.v)) {
                throw InvalidArgument(fmt::format("v must be >= 0 (got {})", g.v));
            }
        },
        [](const TimeGaussian& g) { validate_time(g); },
        [](const TimeTanhStep& s) { validate_time(s); },
        [](const TimeSinusoid& s) { validate_time(s); },
        [](const TimeProfileWithEnvelope& e) {
            validate_time(e.time_part);
            if (!e.gamma_hat) {
                throw InvalidArgument("spatial envelope transform missing");
            }
        },
        [](const SampledProfile& s) {
            s.signal.validate();
            if (s.gamma_hat && !*s.gamma_hat) {
                throw InvalidArgument("spatial envelope transform missing");
            }
        },
    }, p);
}

std::vector<std::string> perturbation_warnings(const Perturbation& p, const Medium& medium)
{
    std::vector<std::string> out;
    std::optional<double> eta;
    std::visit(Overloaded{
        [](const TravellingGaussian&) {},
        [](const SampledProfile&) {},
        [&](const TimeProfileWithEnvelope& e) { eta = time_eta(e.time_part); },
        [&](const auto& q) { eta = q.eta; },
    }, p);
    const double chi_lowest = medium.resonances().front().chi0;
    if (eta && chi_lowest > 0.0 && std::abs(*eta) / chi_lowest > 0.1) {
        out.push_back(fmt::format("perturbation amplitude eta = {:.6g} is {:.3g} times chi0 of the lowest resonance; "
                                  "first-order results assume eta << chi0",
                                  *eta, std::abs(*eta) / chi_lowest));
    }
    return out;
}

bool is_time_profile(const Perturbation& p)
{
    return !std::holds_alternative<TravellingGaussian>(p);
}

Complex SpectralPerturbation::value(double omega, const Vec3& k) const
{
    switch (support) {
    case SpatialSupport::Full:
        return regular_part(omega, k);
    case SpatialSupport::Envelope:
        return regular_part(omega, k) * gamma_hat(k);
    case SpatialSupport::Homogeneous:
        break;
    }
    throw InvalidArgument("a spatially homogeneous perturbation has no pointwise transform in k");
}

Complex SpectralPerturbation::time_part(double omega) const
{
    return regular_part(omega, Vec3{});
}

SpectralPerturbation SpectralPerturbation::scaled(double s) const
{
    SpectralPerturbation out = *this;
    auto inner = regular_part;
    out.regular_part = [inner, s](double w, const Vec3& k) { return s * inner(w, k); };
    for (auto& d : out.delta_terms) {
        d.weight *= s;
    }
    return out;
}

SpectralPerturbation zero_spectrum()
{
    SpectralPerturbation out;
    out.regular_part = [](double, const Vec3&) { return Complex(0.0, 0.0); };
    return out;
}

double f_T(double omega, double kz, double v, double T)
{
    const double u = omega - kz * v;
    const double x = u * T;
    if (std::abs(x) < 1e-4) {
        return 2.0 * T * (1.0 - x * x / 6.0);
    }
    return 2.0 * std::sin(x) / u;
}

FTSquaredLimit f_T_squared_limit(double omega, double kz, double v, double T)
{
    if (!(T > 0.0)) {
        throw InvalidArgument(fmt::format("T must be positive (got {})", T));
    }
    const double f = f_T(omega, kz, v, T);
    return {f * f, 4.0 * kPi * T};
}

SpectralPerturbation fourier_transform(const Perturbation& p)
{
    validate(p);
    return std::visit(Overloaded{
        [](const TravellingGaussian& g) {
            const double amplitude = std::pow(kTwoPi, 1.5) * g.dchi0 * g.sigma_z * g.sigma_rho * g.sigma_rho;
            SpectralPerturbation out;
            out.regular_part = [g, amplitude](double w, const Vec3& k) {
                const double krho = k.transverse_norm();
                const double envelope = std::exp(-0.5 * (g.sigma_z * g.sigma_z * k.z * k.z +
                                                         g.sigma_rho * g.sigma_rho * krho * krho));
                return Complex(amplitude * envelope * f_T(w, k.z, g.v, g.T), 0.0);
            };
            return out;
        },
        [](const TimeGaussian& g) { return from_time(time_spectrum(g), SpatialSupport::Homogeneous, {}); },
        [](const TimeTanhStep& s) { return from_time(time_spectrum(s), SpatialSupport::Homogeneous, {}); },
        [](const TimeSinusoid& s) { return from_time(time_spectrum(s), SpatialSupport::Homogeneous, {}); },
        [](const TimeProfileWithEnvelope& e) {
            return from_time(time_spectrum(e.time_part), SpatialSupport::Envelope, e.gamma_hat);
        },
        [](const SampledProfile& s) {
            auto signal = s.signal;
            TimeSpectrum ts{[signal](double w) { return numerics::fourier_sum_at(signal, w); }, {}};
            if (s.gamma_hat) {
                return from_time(ts, SpatialSupport::Envelope, *s.gamma_hat);
            }
            return from_time(ts, SpatialSupport::Homogeneous, {});
        },
    }, p);
}

//---------------------------------------------------------------------------//

namespace {

struct FftSetup {
    std::size_t samples;
    double window;
};

FtCheckReport compare_bins(const numerics::SampledSignal& spectrum, double w_min, double w_max,
                           const std::function<Complex(double)>& analytic,
                           const std::function<Complex(double)>& add_back, std::size_t table_rows)
{
    FtCheckReport report;
    std::vector<FtCheckRow> all;
    for (std::size_t j = 0; j < spectrum.samples.size(); ++j) {
        const double w = spectrum.time_at(j);
        const double aw = std::abs(w);
        if (aw < w_min || aw > w_max) {
            continue;
        }
        const Complex ana = analytic(w);
        const Complex num = spectrum.samples[j] + add_back(w);
        all.push_back({w, ana, num, std::abs(num - ana) / std::abs(ana)});
    }
    if (all.empty()) {
        throw InvalidArgument("ft-check grid has no bins in the comparison band; increase the window");
    }
    for (const auto& row : all) {
        report.max_rel_dev = std::max(report.max_rel_dev, row.rel_dev);
    }
    report.compared_bins = all.size();
    const std::size_t rows = std::max<std::size_t>(2, std::min(table_rows, all.size()));
    for (std::size_t i = 0; i < rows; ++i) {
        report.rows.push_back(all[i * (all.size() - 1) / (rows - 1)]);
    }
    return report;
}

numerics::SampledSignal sample(const std::function<double(double)>& f, const FftSetup& setup)
{
    numerics::SampledSignal signal;
    signal.dt = 2.0 * setup.window / static_cast<double>(setup.samples);
    signal.t0 = -setup.window;
    signal.samples.resize(setup.samples);
    for (std::size_t i = 0; i < setup.samples; ++i) {
        signal.samples[i] = f(signal.time_at(i));
    }
    return signal;
}

FtCheckReport check_profile(const TimeProfile& profile, const FtCheckOptions& options)
{
    return std::visit(Overloaded{
        [&](const TimeGaussian& g) {
            const double root_a = std::sqrt(g.a);
            const FftSetup setup{options.samples ? options.samples : 4096,
                                 options.window > 0.0 ? options.window : 12.0 / root_a};
            const auto signal = sample([&](double t) { return g.eta * std::exp(-g.a * t * t); }, setup);
            const auto spectrum = numerics::fourier_transform_numeric(signal);
            const auto analytic = time_spectrum(g).regular;
            auto report = compare_bins(spectrum, 0.0, 6.0 * root_a, analytic,
                                       [](double) { return Complex(0.0, 0.0); }, options.table_rows);
            double alt = 0.0;
            for (std::size_t j = 0; j < spectrum.samples.size(); ++j) {
                const double w = spectrum.time_at(j);
                if (w == 0.0 || std::abs(w) > 6.0 * root_a) {
                    continue;
                }
                const double exact = std::abs(analytic(w));
                const double printed = std::abs(g.eta) * kPi / std::sqrt(std::abs(w)) * std::exp(-w * w / (4.0 * g.a));
                alt = std::max(alt, std::abs(printed - exact) / exact);
            }
            report.profile = "gaussian";
            report.alt_prefactor_deviation = alt;
            report.note = fmt::format(
                "analytic eta*sqrt(pi/a)*exp(-w^2/4a) vs FFT; the eta*pi/sqrt(w) prefactor form deviates by up to "
                "{:.3e} (relative) over the same bins and is not dimensionally consistent",
                alt);
            return report;
        },
        [&](const TimeTanhStep& s) {
            const FftSetup setup{options.samples ? options.samples : 16384,
                                 options.window > 0.0 ? options.window : 40.0 / s.a};
            // tanh - erf decays at both ends; the common step and its 2 pi eta delta(w) cancel.
            const auto signal =
                sample([&](double t) { return s.eta * (std::tanh(s.a * t) - std::erf(s.a * t)); }, setup);
            const auto spectrum = numerics::fourier_transform_numeric(signal);
            const double a = s.a;
            const double eta = s.eta;
            auto erf_part = [a, eta](double w) {
                return Complex(0.0, 2.0 * eta / w * std::exp(-w * w / (4.0 * a * a)));
            };
            auto report = compare_bins(spectrum, a / 20.0, 6.0 * a, time_spectrum(s).regular, erf_part,
                                       options.table_rows);
            report.profile = "tanh";
            report.delta_terms = time_spectrum(s).deltas;
            report.note = "regular part i*pi*eta/(a*sinh(pi*w/2a)) under the exp(+i w t) convention, compared for "
                          "a/20 <= |w| <= 6a after subtracting eta*erf(a t); delta term 2*pi*eta at w = 0";
            return report;
        },
        [&](const TimeSinusoid& s) {
            FtCheckReport report;
            report.profile = "sinusoid";
            report.delta_terms = time_spectrum(s).deltas;
            report.note = fmt::format("no regular part; delta lines at w = -a, 0, +a with a = {:.17g}", s.a);
            return report;
        },
    }, profile);
}

}  // namespace

FtCheckReport ft_check(const Perturbation& p, const FtCheckOptions& options)
{
    validate(p);
    if (const auto* g = std::get_if<TimeGaussian>(&p)) {
        return check_profile(*g, options);
    }
    if (const auto* s = std::get_if<TimeTanhStep>(&p)) {
        return check_profile(*s, options);
    }
    if (const auto* s = std::get_if<TimeSinusoid>(&p)) {
        return check_profile(*s, options);
    }
    if (const auto* e = std::get_if<TimeProfileWithEnvelope>(&p)) {
        return check_profile(e->time_part, options);
    }
    throw InvalidArgument("ft-check needs an analytic time profile (gaussian, tanh or sinusoid)");
}

}  // namespace polpair
