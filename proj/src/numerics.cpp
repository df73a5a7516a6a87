#include "polpair/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "polpair/errors.hpp"

namespace polpair::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod 15-point abscissae and weights; the odd-indexed abscissae are the
// 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
};

Segment gauss_kronrod_15(const RealFunction& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double abs_half = std::abs(half);

    const double fc = f(center);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    double result_abs = std::abs(result_kronrod);
    std::array<double, 7> fv1{};
    std::array<double, 7> fv2{};

    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[static_cast<std::size_t>(j)];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[static_cast<std::size_t>(j)] = f1;
        fv2[static_cast<std::size_t>(j)] = f2;
        result_kronrod += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
        result_abs += kWgk[static_cast<std::size_t>(j)] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) {
            result_gauss += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
        }
    }

    const double mean = 0.5 * result_kronrod;
    double result_asc = kWgk[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        result_asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    }

    const double value = result_kronrod * half;
    result_abs *= abs_half;
    result_asc *= abs_half;
    double error = std::abs((result_kronrod - result_gauss) * half);
    if (result_asc != 0.0 && error != 0.0) {
        error = result_asc * std::min(1.0, std::pow(200.0 * error / result_asc, 1.5));
    }
    if (result_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
        error = std::max(50.0 * kEps * result_abs, error);
    }
    if (!std::isfinite(value)) {
        throw ToleranceNotMet(fmt::format("integrand not finite on [{}, {}]", a, b));
    }
    return {a, b, value, error};
}

template <class Range>
double ordered_sum(const Range& segments, double Segment::*field)
{
    double total = 0.0;
    for (const auto& s : segments) {
        total += s.*field;
    }
    return total;
}

}  // namespace

void QuadratureSpec::validate() const
{
    if (!(rel_tol >= 0.0) || !(abs_tol >= 0.0) || (rel_tol == 0.0 && abs_tol == 0.0)) {
        throw InvalidArgument("quadrature tolerances must be non-negative and not both zero");
    }
    if (max_subdivisions < 1) {
        throw InvalidArgument("max_subdivisions must be >= 1");
    }
}

namespace {

// Global adaptive Gauss-Kronrod over the panels delimited by `edges`.
QuadratureResult integrate_adaptive(const RealFunction& f, const std::vector<double>& edges,
                                    const QuadratureSpec& spec)
{
    spec.validate();
    const double a = edges.front();
    const double b = edges.back();

    std::vector<Segment> segments;
    segments.reserve(static_cast<std::size_t>(std::min(spec.max_subdivisions, 4096)));
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        segments.push_back(gauss_kronrod_15(f, edges[i], edges[i + 1]));
    }
    int evaluations = 15 * static_cast<int>(segments.size());

    auto tolerance = [&](double value) { return std::max(spec.abs_tol, spec.rel_tol * std::abs(value)); };

    double value = ordered_sum(segments, &Segment::value);
    double error = ordered_sum(segments, &Segment::error);
    while (error > tolerance(value)) {
        if (static_cast<int>(segments.size()) >= spec.max_subdivisions) {
            throw ToleranceNotMet(fmt::format(
                "adaptive quadrature on [{}, {}] exhausted {} subdivisions (value {}, error {})", a, b,
                spec.max_subdivisions, value, error));
        }
        auto worst = std::max_element(segments.begin(), segments.end(),
                                      [](const Segment& l, const Segment& r) { return l.error < r.error; });
        const double mid = 0.5 * (worst->a + worst->b);
        if (!(mid > worst->a && mid < worst->b) ||
            (worst->b - worst->a) < 100.0 * kEps * std::max(std::abs(worst->a), std::abs(worst->b))) {
            throw ToleranceNotMet(fmt::format(
                "adaptive quadrature on [{}, {}] hit roundoff near x = {} (value {}, error {})", a, b, mid,
                value, error));
        }
        const Segment left = gauss_kronrod_15(f, worst->a, mid);
        const Segment right = gauss_kronrod_15(f, mid, worst->b);
        evaluations += 30;
        *worst = left;
        segments.push_back(right);
        value = ordered_sum(segments, &Segment::value);
        error = ordered_sum(segments, &Segment::error);
    }

    std::sort(segments.begin(), segments.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
    return {ordered_sum(segments, &Segment::value), ordered_sum(segments, &Segment::error), evaluations};
}

}  // namespace

QuadratureResult integrate_1d(const RealFunction& f, double a, double b,
                              const QuadratureSpec& spec)
{
    if (!(a < b)) {
        throw InvalidArgument(fmt::format("integration bounds must satisfy a < b (got {}, {})", a, b));
    }
    return integrate_adaptive(f, {a, b}, spec);
}

QuadratureResult integrate_semi_infinite(const RealFunction& f, double a, const QuadratureSpec& spec)
{
    const RealFunction mapped = [&f, a](double t) {
        const double one_minus = 1.0 - t;
        const double x = a + t / one_minus;
        return f(x) / (one_minus * one_minus);
    };
    return integrate_1d(mapped, 0.0, 1.0, spec);
}

QuadratureResult integrate_piecewise(const RealFunction& f, std::vector<double> breakpoints,
                                     const QuadratureSpec& spec)
{
    if (breakpoints.size() < 2) {
        throw InvalidArgument("integrate_piecewise needs at least two breakpoints");
    }
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
        throw InvalidArgument("integrate_piecewise breakpoints must be increasing");
    }
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    if (breakpoints.size() < 2) {
        throw InvalidArgument("integrate_piecewise needs a non-empty interval");
    }
    return integrate_adaptive(f, breakpoints, spec);
}

//---------------------------------------------------------------------------//

double polish_root(const std::function<std::pair<double, double>(double)>& f, double lo, double hi,
                   const RootSpec& spec)
{
    if (lo > hi) {
        std::swap(lo, hi);
    }
    const double f_lo = f(lo).first;
    const double f_hi = f(hi).first;
    if (f_lo == 0.0) {
        return lo;
    }
    if (f_hi == 0.0) {
        return hi;
    }
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw RootSolverFailure(fmt::format("no sign change on [{}, {}] ({}, {})", lo, hi, f_lo, f_hi));
    }
    const bool increasing = f_lo < 0.0;

    double a = lo;
    double b = hi;
    double x = 0.5 * (a + b);
    double step_old = b - a;
    double step = step_old;
    for (int iter = 0; iter < spec.max_iter; ++iter) {
        const auto [fx, dfx] = f(x);
        if (fx == 0.0) {
            return x;
        }
        if ((fx < 0.0) == increasing) {
            a = x;
        } else {
            b = x;
        }
        const double tol = std::max(spec.x_tol, 2.0 * kEps * std::max(std::abs(a), std::abs(b)));
        if (b - a <= tol) {
            return x;
        }

        const double newton = x - fx / dfx;
        double next = 0.0;
        if (!std::isfinite(newton) || newton <= a || newton >= b || std::abs(2.0 * fx) > std::abs(step_old * dfx)) {
            next = 0.5 * (a + b);
        } else {
            next = newton;
        }
        step_old = step;
        step = next - x;
        if (std::abs(step) <= tol) {
            return next;
        }
        x = next;
    }
    throw RootSolverFailure(fmt::format("root polish did not converge within {} iterations on [{}, {}]",
                                        spec.max_iter, lo, hi));
}

std::vector<std::pair<double, double>> scan_sign_changes(const RealFunction& f, const std::vector<double>& nodes)
{
    std::vector<std::pair<double, double>> brackets;
    if (nodes.empty()) {
        return brackets;
    }
    double x_prev = nodes.front();
    double f_prev = f(x_prev);
    if (f_prev == 0.0) {
        brackets.emplace_back(x_prev, x_prev);
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double x = nodes[i];
        const double fx = f(x);
        if (fx == 0.0) {
            brackets.emplace_back(x, x);
        } else if (f_prev != 0.0 && (fx > 0.0) != (f_prev > 0.0)) {
            brackets.emplace_back(x_prev, x);
        }
        x_prev = x;
        f_prev = fx;
    }
    return brackets;
}

//---------------------------------------------------------------------------//

std::vector<double> quadratic_real_roots(double c0, double c1)
{
    const double disc = std::max(0.0, c1 * c1 - 4.0 * c0);
    const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    std::vector<double> roots;
    if (q == 0.0) {
        roots = {0.0, 0.0};
    } else {
        roots = {q, c0 / q};
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace {

using Real = long double;

// Roots of x^3 + c2 x^2 + c1 x + c0 (all real by contract), ascending.
std::vector<Real> cubic_roots_ext(Real c0, Real c1, Real c2)
{
    const Real shift = c2 / 3.0L;
    const Real p = c1 - c2 * c2 / 3.0L;
    const Real q = 2.0L * c2 * c2 * c2 / 27.0L - c2 * c1 / 3.0L + c0;

    std::vector<Real> roots;
    if (p < 0.0L) {
        const Real m = 2.0L * std::sqrt(-p / 3.0L);
        Real arg = 3.0L * q / (p * m);
        arg = std::clamp(arg, -1.0L, 1.0L);
        const Real phi = std::acos(arg) / 3.0L;
        for (int k = 0; k < 3; ++k) {
            roots.push_back(m * std::cos(phi - 2.0L * std::numbers::pi_v<Real> * k / 3.0L) - shift);
        }
    } else {
        // Triple root (p == 0) or a single real root; the latter is outside
        // the contract but handled via Cardano's real branch.
        const Real disc = q * q / 4.0L + p * p * p / 27.0L;
        const Real s = std::sqrt(std::max(disc, 0.0L));
        roots.push_back(std::cbrt(-q / 2.0L + s) + std::cbrt(-q / 2.0L - s) - shift);
    }
    std::sort(roots.begin(), roots.end(), [](Real l, Real r) { return std::abs(l) < std::abs(r); });
    // The smallest-magnitude root suffers cancellation against the shift;
    // recover it from the product of roots.
    if (roots.size() == 3 && roots[1] != 0.0L && roots[2] != 0.0L) {
        roots[0] = -c0 / (roots[1] * roots[2]);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

// Stable roots of x^2 + b x + c; a negative discriminant is clamped to zero.
void push_quadratic_ext(std::vector<Real>& out, Real b, Real c)
{
    const Real disc = std::max(0.0L, b * b - 4.0L * c);
    const Real q = -0.5L * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0.0L) {
        out.push_back(0.0L);
        out.push_back(0.0L);
    } else {
        out.push_back(q);
        out.push_back(c / q);
    }
}

}  // namespace

std::vector<double> cubic_real_roots(double c0, double c1, double c2)
{
    const auto roots = cubic_roots_ext(c0, c1, c2);
    return {roots.begin(), roots.end()};
}

std::vector<double> quartic_real_roots(double c0, double c1, double c2, double c3)
{
    const Real a = c3;
    const Real b = c2;
    const Real c = c1;
    const Real d = c0;

    // Ferrari without depressing: the largest root y of the resolvent
    //   y^3 - b y^2 + (a c - 4 d) y - (a^2 d - 4 b d + c^2) = 0
    // is r3 r4 + r1 r2 for real roots, which pairs the two largest roots in
    // one quadratic factor (x^2 + p1 x + q1)(x^2 + p2 x + q2), q1 + q2 = y,
    // q1 q2 = d. Depressing first would collapse widely spread roots onto the
    // shift and make the resolvent roots nearly degenerate.
    const Real r0 = -(a * a * d - 4.0L * b * d + c * c);
    const Real r1 = a * c - 4.0L * d;
    Real y = cubic_roots_ext(r0, r1, -b).back();
    const Real g = ((y - b) * y + r1) * y + r0;
    const Real dg = (3.0L * y - 2.0L * b) * y + r1;
    if (dg != 0.0L) {
        y -= g / dg;
    }

    std::vector<Real> q_pair;
    push_quadratic_ext(q_pair, -y, d);
    Real q1 = q_pair[0];
    Real q2 = q_pair[1];
    if (std::abs(q1) < std::abs(q2)) {
        std::swap(q1, q2);
    }
    Real p1 = 0.0L;
    Real p2 = 0.0L;
    const Real spread = a * a / 4.0L - b + y;
    if (std::abs(q1 - q2) > 1e-6L * std::abs(q1)) {
        p1 = (a * q1 - c) / (q1 - q2);
        p2 = (c - a * q2) / (q1 - q2);
    } else {
        // Equal q: fall back to the completed square, p = a/2 +- sqrt(spread).
        const Real e = std::sqrt(std::max(spread, 0.0L));
        const Real sign = (a * y / 2.0L - c) < 0.0L ? -1.0L : 1.0L;
        p1 = a / 2.0L + sign * e;
        p2 = a / 2.0L - sign * e;
    }

    std::vector<Real> roots;
    push_quadratic_ext(roots, p1, q1);
    push_quadratic_ext(roots, p2, q2);
    std::sort(roots.begin(), roots.end(), [](Real l, Real r) { return std::abs(l) < std::abs(r); });
    if (roots[1] != 0.0L && roots[2] != 0.0L && roots[3] != 0.0L) {
        roots[0] = d / (roots[1] * roots[2] * roots[3]);
    }
    std::vector<double> out(roots.begin(), roots.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<double> dispatch_closed_form(const std::vector<double>& c)
{
    switch (c.size()) {
    case 2:
        return {-c[0]};
    case 3:
        return quadratic_real_roots(c[0], c[1]);
    case 4:
        return cubic_real_roots(c[0], c[1], c[2]);
    case 5:
        return quartic_real_roots(c[0], c[1], c[2], c[3]);
    default:
        throw InvalidArgument(fmt::format("closed-form roots need degree 1..4 (got {})", c.size() - 1));
    }
}

}  // namespace

std::vector<double> real_roots_closed_form(const std::vector<double>& monic_coeffs)
{
    auto direct = dispatch_closed_form(monic_coeffs);
    const double c0 = monic_coeffs.front();
    const std::size_t n = monic_coeffs.size() - 1;
    if (c0 == 0.0 || n < 3) {
        return direct;
    }
    std::vector<double> reversed(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        reversed[j] = monic_coeffs[n - j] / c0;
    }
    const auto inverse = dispatch_closed_form(reversed);

    auto by_magnitude = [](double l, double r) { return std::abs(l) < std::abs(r); };
    // Each route has an absolute error set by its own largest root, so the
    // largest root comes from P and the smallest from the reversal.
    const double largest = *std::max_element(direct.begin(), direct.end(), by_magnitude);
    const double smallest = 1.0 / *std::max_element(inverse.begin(), inverse.end(), by_magnitude);

    std::vector<double> roots = {smallest, largest};
    if (n == 3) {
        // r1 r2 r3 = -c0
        roots.push_back(-c0 / (smallest * largest));
    } else {
        // Remaining pair from Vieta: product p = e4 / (r1 r4) and sum from
        // e2 = (r1 + r4)(r2 + r3) + r1 r4 + r2 r3, whose dominant term is kept.
        const double product = c0 / (smallest * largest);
        const double e2 = monic_coeffs[2];
        const double sum = (e2 - smallest * largest - product) / (smallest + largest);
        const auto middle = quadratic_real_roots(product, -sum);
        roots.insert(roots.end(), middle.begin(), middle.end());
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

//---------------------------------------------------------------------------//

double bessel_j0(double x)
{
    return std::cyl_bessel_j(0.0, x);
}

//---------------------------------------------------------------------------//

void SampledSignal::validate() const
{
    if (!(dt > 0.0)) {
        throw InvalidArgument("sampled signal needs dt > 0");
    }
    const auto n = samples.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw InvalidArgument(fmt::format("sampled signal length {} is not a power of two", n));
    }
}

void fft_in_place(std::vector<Complex>& data, int sign)
{
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw InvalidArgument(fmt::format("FFT length {} is not a power of two", n));
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(data[i], data[j]);
        }
    }
    const double direction = sign >= 0 ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        std::vector<Complex> twiddle(half);
        for (std::size_t k = 0; k < half; ++k) {
            twiddle[k] = std::polar(1.0, direction * 2.0 * std::numbers::pi * static_cast<double>(k) /
                                             static_cast<double>(len));
        }
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex u = data[start + k];
                const Complex v = data[start + k + half] * twiddle[k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
    }
}

SampledSignal fourier_transform_numeric(const SampledSignal& signal, double edge_tol)
{
    signal.validate();
    const std::size_t m = signal.samples.size();
    double peak = 0.0;
    for (const auto& s : signal.samples) {
        peak = std::max(peak, std::abs(s));
    }
    const double edge = std::max(std::abs(signal.samples.front()), std::abs(signal.samples.back()));
    if (m > 1 && edge > edge_tol * peak) {
        throw WindowTooShort(fmt::format(
            "signal is {:.3g} of its peak at the window edge (limit {:.3g}); widen the time window", edge / peak,
            edge_tol));
    }

    std::vector<Complex> work(m);
    for (std::size_t n = 0; n < m; ++n) {
        work[n] = (n % 2 == 0) ? signal.samples[n] : -signal.samples[n];
    }
    fft_in_place(work, +1);

    SampledSignal out;
    out.dt = 2.0 * std::numbers::pi / (static_cast<double>(m) * signal.dt);
    out.t0 = -std::numbers::pi / signal.dt;
    out.samples.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double omega = out.time_at(j);
        out.samples[j] = signal.dt * std::polar(1.0, omega * signal.t0) * work[j];
    }
    return out;
}

SampledSignal inverse_fourier_transform_numeric(const SampledSignal& spectrum, double t0)
{
    spectrum.validate();
    const std::size_t m = spectrum.samples.size();
    const double d_omega = spectrum.dt;
    const double omega0 = spectrum.t0;

    std::vector<Complex> work(m);
    for (std::size_t j = 0; j < m; ++j) {
        work[j] = spectrum.samples[j] * std::polar(1.0, -static_cast<double>(j) * d_omega * t0);
    }
    fft_in_place(work, -1);

    SampledSignal out;
    out.t0 = t0;
    out.dt = 2.0 * std::numbers::pi / (static_cast<double>(m) * d_omega);
    out.samples.resize(m);
    for (std::size_t n = 0; n < m; ++n) {
        out.samples[n] = d_omega / (2.0 * std::numbers::pi) * std::polar(1.0, -omega0 * out.time_at(n)) * work[n];
    }
    return out;
}

Complex fourier_sum_at(const SampledSignal& signal, double omega)
{
    Complex sum{0.0, 0.0};
    for (std::size_t n = 0; n < signal.samples.size(); ++n) {
        sum += signal.samples[n] * std::polar(1.0, omega * signal.time_at(n));
    }
    return sum * signal.dt;
}

}  // namespace polpair::numerics
