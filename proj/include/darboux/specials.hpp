#ifndef DARBOUX_SPECIALS_HPP
#define DARBOUX_SPECIALS_HPP

// Real-argument special functions used as validation oracles. All of them
// throw std::domain_error outside their documented domain.

namespace darboux::special {

/// Lanczos approximation (g = 7, 9 terms) with reflection below 1/2.
double gamma(double x);

/// Bessel function of the first kind, |nu| <= 2, w >= 0. Power series for
/// w <= 12, Hankel asymptotic expansion beyond.
double bessel_j(double nu, double w);

/// Bessel function of the second kind, w > 0. Non-integer orders via
/// (J_nu cos(nu pi) - J_{-nu}) / sin(nu pi); orders 0 and 1 by their
/// logarithmic series, 2 by recurrence.
double bessel_y(double nu, double w);

/// Separation threshold between the series and the asymptotic branch.
inline constexpr double kBesselAsymptoticFrom = 12.0;

/// Both Bessel branches forced, for checking agreement across the seam.
double bessel_j_series(double nu, double w);
double bessel_y_series(double nu, double w);
double bessel_j_asymptotic(double nu, double w);
double bessel_y_asymptotic(double nu, double w);

/// sqrt(z) * (c1 J_{1/4}(z^2/2) + c2 Y_{1/4}(z^2/2)), the general zero mode of
/// psi'' + z^2 psi = 0. Requires z > 0.
double quarter_bessel_mode(double z, double c1, double c2);

/// \int_0^x exp(t^2) dt = sum_n x^{2n+1} / (n! (2n+1)), for |x| <= 3.
double erfi_scaled(double x);

}  // namespace darboux::special

#endif  // DARBOUX_SPECIALS_HPP
