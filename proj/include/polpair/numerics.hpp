#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace polpair::numerics {

using RealFunction = std::function<double(double)>;
using Complex = std::complex<double>;

//---------------------------------------------------------------------------//
// Quadrature
//---------------------------------------------------------------------------//

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    int max_subdivisions = 10'000;

    // Throws InvalidArgument unless both tolerances are >= 0 (at least one
    // positive) and max_subdivisions >= 1.
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    int evaluations = 0;
};

/*!
 * Adaptive Gauss-Kronrod (7/15) quadrature with global bisection of the
 * interval carrying the largest error estimate.
 *
 * Converges when error <= max(abs_tol, rel_tol * |value|). The subdivision
 * order is fixed, so identical inputs give bit-identical results. Throws
 * ToleranceNotMet once max_subdivisions intervals are exhausted.
 */
QuadratureResult integrate_1d(const RealFunction& f, double a, double b,
                              const QuadratureSpec& spec = {});

// Integral over [a, inf) through the map x = a + t / (1 - t), t in [0, 1).
QuadratureResult integrate_semi_infinite(const RealFunction& f, double a,
                                         const QuadratureSpec& spec = {});

// Integral over [breakpoints.front(), breakpoints.back()] with the
// breakpoints as initial panels. Refinement and the stopping test are global,
// as in integrate_1d.
QuadratureResult integrate_piecewise(const RealFunction& f, std::vector<double> breakpoints,
                                     const QuadratureSpec& spec = {});

//---------------------------------------------------------------------------//
// Root finding
//---------------------------------------------------------------------------//

struct RootSpec {
    double x_tol = 0.0;  // absolute; 0 means "to machine precision"
    int max_iter = 200;
};

/*!
 * Safeguarded Newton/bisection root polish on [lo, hi].
 *
 * `f` returns the pair (value, derivative). The bracket must have a sign
 * change; a Newton step that leaves the current bracket or fails to halve it
 * is replaced by bisection. Throws RootSolverFailure when the bracket has no
 * sign change or max_iter is reached.
 */
double polish_root(const std::function<std::pair<double, double>(double)>& f, double lo,
                   double hi, const RootSpec& spec = {});

// Brackets of sign changes of `f` sampled at the given (increasing) nodes.
// Exact zeros at nodes are reported as degenerate brackets [x, x].
std::vector<std::pair<double, double>> scan_sign_changes(const RealFunction& f,
                                                          const std::vector<double>& nodes);

//---------------------------------------------------------------------------//
// Polynomials
//---------------------------------------------------------------------------//

// Real roots (ascending) of monic polynomials, closed-form. Only meant for
// polynomials whose roots are all real; coefficients are lowest order first
// and exclude the leading 1.
std::vector<double> quadratic_real_roots(double c0, double c1);
std::vector<double> cubic_real_roots(double c0, double c1, double c2);
std::vector<double> quartic_real_roots(double c0, double c1, double c2, double c3);

/*!
 * Real roots (ascending) of a monic polynomial of degree 1..4 with nonzero,
 * all-real roots, by closed form. The largest-magnitude root comes from the
 * polynomial itself, the smallest from its reversal y^n P(1/y), and the
 * interior ones from Vieta's relations, which keeps widely spread roots
 * accurate in relative terms.
 */
std::vector<double> real_roots_closed_form(const std::vector<double>& monic_coeffs);

//---------------------------------------------------------------------------//
// Special functions
//---------------------------------------------------------------------------//

// Bessel function of the first kind, order zero.
double bessel_j0(double x);

//---------------------------------------------------------------------------//
// Fourier transforms
//---------------------------------------------------------------------------//

// Uniformly sampled complex signal. The same type carries time-domain data
// (t0, dt in seconds) and frequency-domain data (t0, dt in rad/s).
struct SampledSignal {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<Complex> samples;

    double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    // Throws InvalidArgument unless dt > 0 and samples.size() is a power of two.
    void validate() const;
};

// In-place radix-2 transform X_j = sum_n x_n exp(sign * 2 pi i j n / M).
// Length must be a power of two.
void fft_in_place(std::vector<Complex>& data, int sign);

/*!
 * Discrete approximation of F(w) = integral exp(+i w t) f(t) dt.
 *
 * Output grid: w_j = -pi/dt + j * 2 pi / (M dt), j = 0..M-1 (ascending, with
 * w = 0 at j = M/2). Throws WindowTooShort if |f| at either window edge
 * exceeds edge_tol times the peak magnitude.
 */
SampledSignal fourier_transform_numeric(const SampledSignal& signal, double edge_tol = 1e-10);

// Inverse of fourier_transform_numeric: f(t) = (1/2pi) integral exp(-i w t) F(w) dw,
// returned on a time grid starting at t0.
SampledSignal inverse_fourier_transform_numeric(const SampledSignal& spectrum, double t0);

// Direct (trapezoid) evaluation of integral exp(+i w t) f(t) dt at one frequency.
Complex fourier_sum_at(const SampledSignal& signal, double omega);

}  // namespace polpair::numerics
