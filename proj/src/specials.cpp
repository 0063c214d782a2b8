#include "darboux/specials.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace darboux::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;

constexpr std::array<double, 9> kLanczos{
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

bool is_integer(double v) { return v == std::trunc(v); }

void check_order(double nu) {
    if (!(std::abs(nu) <= 2.0)) throw std::domain_error("Bessel order outside |nu| <= 2");
}

// sqrt(2/(pi w)) times (P, Q) of the Hankel expansion.
struct Hankel {
    double p;
    double q;
};

Hankel hankel(double nu, double w) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double p = 1.0, q = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * w);
        const double mag = std::abs(term);
        if (mag > prev) break;  // series started diverging
        prev = mag;
        switch (k % 4) {
        case 1: q += term; break;
        case 2: p -= term; break;
        case 3: q -= term; break;
        case 0: p += term; break;
        }
        if (mag < kEps * (std::abs(p) + std::abs(q))) break;
    }
    return {p, q};
}

}  // namespace

double gamma(double x) {
    if (x <= 0.0 && is_integer(x)) throw std::domain_error("gamma pole at " + std::to_string(x));
    if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma(1.0 - x));
    x -= 1.0;
    double a = kLanczos[0];
    const double t = x + 7.5;
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
    return std::sqrt(2.0 * kPi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double bessel_j_series(double nu, double w) {
    if (w < 0.0) throw std::domain_error("Bessel J needs a non-negative argument");
    if (nu < 0.0 && is_integer(nu)) {
        const double v = bessel_j_series(-nu, w);
        return static_cast<int>(-nu) % 2 == 0 ? v : -v;
    }
    if (w == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw std::domain_error("J_nu(0) diverges for negative non-integer nu");
    }
    const double half = 0.5 * w;
    const double q = -half * half;
    double term = std::pow(half, nu) / gamma(nu + 1.0);
    double sum = term;
    for (int k = 0; k < 500; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (k > half && std::abs(term) <= kEps * std::abs(sum)) break;
    }
    return sum;
}

double bessel_j_asymptotic(double nu, double w) {
    if (!(w > 0.0)) throw std::domain_error("asymptotic Bessel expansion needs w > 0");
    const Hankel h = hankel(nu, w);
    const double chi = w - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * w)) * (h.p * std::cos(chi) - h.q * std::sin(chi));
}

double bessel_y_asymptotic(double nu, double w) {
    if (!(w > 0.0)) throw std::domain_error("asymptotic Bessel expansion needs w > 0");
    const Hankel h = hankel(nu, w);
    const double chi = w - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * w)) * (h.p * std::sin(chi) + h.q * std::cos(chi));
}

double bessel_y_series(double nu, double w) {
    if (!(w > 0.0)) throw std::domain_error("Bessel Y needs a positive argument");
    if (!is_integer(nu)) {
        const double s = std::sin(nu * kPi);
        return (bessel_j_series(nu, w) * std::cos(nu * kPi) - bessel_j_series(-nu, w)) / s;
    }
    if (nu < 0.0) {
        const double v = bessel_y_series(-nu, w);
        return static_cast<int>(-nu) % 2 == 0 ? v : -v;
    }
    const double half = 0.5 * w;
    const double q = half * half;
    const double log_term = std::log(half);
    if (nu == 0.0) {
        // (2/pi)(ln(w/2) + gamma) J0 + (2/pi) sum (-1)^{k+1} H_k (w^2/4)^k / (k!)^2
        double term = 1.0, harmonic = 0.0, sum = 0.0;
        for (int k = 1; k < 500; ++k) {
            term *= -q / (static_cast<double>(k) * k);
            harmonic += 1.0 / k;
            const double add = -term * harmonic;
            sum += add;
            if (k > half && std::abs(add) <= kEps * std::abs(sum)) break;
        }
        return 2.0 / kPi * ((log_term + kEulerGamma) * bessel_j_series(0.0, w) + sum);
    }
    if (nu == 1.0) {
        // (2/pi) J1 ln(w/2) - 2/(pi w) - (1/pi) sum (-1)^k [psi(k+1)+psi(k+2)] (w/2)^{2k+1} / (k!(k+1)!)
        double term = half;  // (w/2)^{2k+1} / (k! (k+1)!) at k = 0
        double harmonic = 0.0;
        double sum = 0.0;
        for (int k = 0; k < 500; ++k) {
            if (k > 0) {
                term *= -q / (static_cast<double>(k) * (k + 1.0));
                harmonic += 1.0 / k;
            }
            const double digammas = 2.0 * harmonic + 1.0 / (k + 1.0) - 2.0 * kEulerGamma;
            const double add = term * digammas;
            sum += add;
            if (k > half && std::abs(add) <= kEps * std::abs(sum)) break;
        }
        return 2.0 / kPi * bessel_j_series(1.0, w) * log_term - 2.0 / (kPi * w) - sum / kPi;
    }
    if (nu == 2.0) return 2.0 / w * bessel_y_series(1.0, w) - bessel_y_series(0.0, w);
    throw std::domain_error("unsupported integer Bessel order");
}

double bessel_j(double nu, double w) {
    check_order(nu);
    if (w < 0.0) throw std::domain_error("Bessel J needs a non-negative argument");
    return w <= kBesselAsymptoticFrom ? bessel_j_series(nu, w) : bessel_j_asymptotic(nu, w);
}

double bessel_y(double nu, double w) {
    check_order(nu);
    if (!(w > 0.0)) throw std::domain_error("Bessel Y needs a positive argument");
    return w <= kBesselAsymptoticFrom ? bessel_y_series(nu, w) : bessel_y_asymptotic(nu, w);
}

double quarter_bessel_mode(double z, double c1, double c2) {
    if (!(z > 0.0)) throw std::domain_error("quarter-order Bessel mode needs z > 0");
    const double w = 0.5 * z * z;
    double v = 0.0;
    if (c1 != 0.0) v += c1 * bessel_j(0.25, w);
    if (c2 != 0.0) v += c2 * bessel_y(0.25, w);
    return std::sqrt(z) * v;
}

double erfi_scaled(double x) {
    if (!(std::abs(x) <= 3.0))
        throw std::domain_error("erfi series limited to |x| <= 3; integrate exp(t^2) numerically instead");
    const double x2 = x * x;
    double power = x;  // x^{2n+1} / n!
    double sum = x;
    for (int n = 1; n < 400; ++n) {
        power *= x2 / n;
        const double add = power / (2.0 * n + 1.0);
        sum += add;
        if (std::abs(add) <= kEps * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace darboux::special
