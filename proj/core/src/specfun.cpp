#include "kmc/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kmc/errors.hpp"

namespace kmc::specfun {

namespace {

constexpr double kTwoOverSqrtPi = 2.0 / 1.7724538509055160273;

// Giles, "Approximating the erfinv function" (GPU Gems 2010), single
// precision branch; used only as a starting point.
double erfinv_guess(double w, double z) {
    double p;
    if (w < 5.0) {
        w -= 2.5;
        p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
    } else {
        w = std::sqrt(w) - 3.0;
        p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
    }
    return p * z;
}

}  // namespace

double erfc_inv(double y) {
    if (!(y > 0.0 && y < 2.0)) throw DomainError("erfc_inv: argument outside (0, 2)");
    if (y == 1.0) return 0.0;
    if (y > 1.0) return -erfc_inv(2.0 - y);

    const double z = 1.0 - y;
    const double w = -std::log(y * (2.0 - y));
    double x;
    if (y > 1e-12) {
        x = erfinv_guess(w, z);
    } else {
        // erfc(x) ~ exp(-x^2) / (x sqrt(pi))
        const double L = -std::log(y);
        x = std::sqrt(L - std::log(std::sqrt(std::numbers::pi * L)));
    }

    // Halley iteration; convergence is cubic, so a relative step below 1e-6
    // leaves an error below double precision.
    if (y >= 0.5) {
        // 1 - y is exact for y in [0.5, 1].
        for (int it = 0; it < 8; ++it) {
            const double r = (std::erf(x) - z) / (kTwoOverSqrtPi * std::exp(-x * x));
            const double dx = -r / (1.0 + x * r);
            x += dx;
            if (std::abs(dx) <= 1e-6 * std::abs(x)) break;
        }
        return x;
    }
    // Residual measured relative to y through erfcx, so the tail neither
    // underflows nor overshoots.
    const double ly = std::log(y);
    for (int it = 0; it < 12; ++it) {
        const double ex = erfcx(x);
        const double rel = std::expm1(std::log(ex) - x * x - ly);
        const double delta = -rel * ex / ((1.0 + rel) * kTwoOverSqrtPi);
        const double dx = -delta / (1.0 + x * delta);
        x += dx;
        if (std::abs(dx) <= 1e-6 * std::abs(x)) break;
    }
    return x;
}

double erfcx(double x) {
    if (x < 0.0) {
        if (x < -26.0) return std::numeric_limits<double>::infinity();
        return 2.0 * std::exp(x * x) - erfcx(-x);
    }
    if (x < 25.0) return std::erfc(x) * std::exp(x * x);
    // Continued fraction erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    double f = x;
    for (int k = 40; k >= 1; --k) f = x + 0.5 * k / f;
    return 1.0 / (std::sqrt(std::numbers::pi) * f);
}

double hemisphere_exit_cdf_large_tau(double tau) {
    if (!(tau > 0.0)) throw DomainError("hemisphere_exit_cdf: tau must be positive");
    double s = 0.0;
    for (int n = 1;; ++n) {
        const double term = std::exp(-double(n) * n * tau);
        s += (n % 2 ? -term : term);
        if (term < 1e-15 || n > 100000) break;
    }
    return 1.0 + 2.0 * s;
}

double hemisphere_exit_cdf_small_tau(double tau) {
    if (!(tau > 0.0)) throw DomainError("hemisphere_exit_cdf: tau must be positive");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double pref = 2.0 * std::sqrt(std::numbers::pi / tau);
    double s = 0.0;
    for (int n = 0;; ++n) {
        const double h = n + 0.5;
        const double term = std::exp(-pi2 * h * h / tau);
        s += term;
        if (pref * term < 1e-15 || n > 100000) break;
    }
    return pref * s;
}

double hemisphere_exit_cdf(double tau) {
    return tau >= 1.0 ? hemisphere_exit_cdf_large_tau(tau) : hemisphere_exit_cdf_small_tau(tau);
}

double hemisphere_exit_pdf(double tau) {
    if (!(tau > 0.0)) throw DomainError("hemisphere_exit_pdf: tau must be positive");
    double s = 0.0;
    if (tau >= 1.0) {
        for (int n = 1;; ++n) {
            const double term = double(n) * n * std::exp(-double(n) * n * tau);
            s += (n % 2 ? term : -term);
            if (term < 1e-16 || n > 100000) break;
        }
        return 2.0 * s;
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int n = 0;; ++n) {
        const double a = pi2 * (n + 0.5) * (n + 0.5);
        const double term = std::exp(-a / tau) * (a / tau - 0.5);
        s += term;
        if (std::abs(term) < 1e-17 * tau || n > 100000) break;
    }
    return 2.0 * std::sqrt(std::numbers::pi) * s * std::pow(tau, -1.5);
}

void legendre_fill(double x, int n_max, double* out) {
    out[0] = 1.0;
    if (n_max == 0) return;
    out[1] = x;
    for (int n = 1; n < n_max; ++n)
        out[n + 1] = ((2.0 * n + 1.0) * x * out[n] - n * out[n - 1]) / (n + 1.0);
}

std::vector<double> legendre_sequence(double x, int n_max) {
    if (!(x >= -1.0 && x <= 1.0)) throw DomainError("legendre_sequence: |x| > 1");
    if (n_max < 0) throw DomainError("legendre_sequence: negative order");
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
    legendre_fill(x, n_max, p.data());
    return p;
}

namespace {

// b_j = a_j / a_n with a_j = (n+j)! / (j! (n-j)!).
void kn_coefficients(int n, double* b) {
    b[n] = 1.0;
    for (int j = n - 1; j >= 0; --j)
        b[j] = b[j + 1] * (j + 1.0) / ((n + j + 1.0) * (n - j));
}

// sum_j b_j u^{-j}, returned as (value, shift) meaning value * u^{-shift}.
cplx poly_scaled(int n, const double* b, cplx u, int& shift) {
    cplx acc = 0.0;
    if (std::abs(u) >= 1.0) {
        const cplx v = 1.0 / u;
        for (int j = n; j >= 0; --j) acc = acc * v + b[j];
        shift = 0;
    } else {
        for (int j = 0; j <= n; ++j) acc = acc * u + b[j];
        shift = n;
    }
    return acc;
}

}  // namespace

cplx kn_ratio(int n, cplx alpha, double R) {
    if (!(R > 1.0)) throw DomainError("kn_ratio: R must exceed 1");
    if (n < 0) throw DomainError("kn_ratio: negative order");
    if (alpha == 0.0) throw DomainError("kn_ratio: alpha must be nonzero");

    const cplx base = std::exp(-alpha * (R - 1.0)) / R;
    if (n == 0) return base;

    double bstack[64];
    std::vector<double> bheap;
    double* b = bstack;
    if (n >= 64) {
        bheap.resize(static_cast<std::size_t>(n) + 1);
        b = bheap.data();
    }
    kn_coefficients(n, b);

    const cplx u = 2.0 * alpha;
    int sn = 0, sd = 0;
    const cplx num = poly_scaled(n, b, u * R, sn);
    const cplx den = poly_scaled(n, b, u, sd);
    cplx ratio = num / den;
    // num carries (uR)^{-sn}, den carries u^{-sd}
    if (sn == n && sd == n) {
        ratio *= std::pow(R, -n);
    } else if (sn == 0 && sd == n) {
        ratio *= std::pow(u, n);
    }
    return base * ratio;
}

std::pair<double, double> sph_bessel_jy(int n, double w) {
    if (!(w > 0.0)) throw DomainError("sph_bessel_jy: argument must be positive");
    if (n < 0) throw DomainError("sph_bessel_jy: negative order");

    const double s = std::sin(w), c = std::cos(w);
    const double j0 = s / w;
    const double j1 = s / (w * w) - c / w;
    double ym = -c / w;
    double y = -c / (w * w) - s / w;
    if (n == 0) y = ym;
    for (int k = 1; k < n; ++k) {
        const double yn = (2.0 * k + 1.0) / w * y - ym;
        ym = y;
        y = yn;
        if (!std::isfinite(y)) break;
    }

    double j;
    if (n == 0) {
        j = j0;
    } else if (n == 1) {
        j = j1;
    } else if (w > n) {
        double jm = j0, jc = j1;
        for (int k = 1; k < n; ++k) {
            const double jn = (2.0 * k + 1.0) / w * jc - jm;
            jm = jc;
            jc = jn;
        }
        j = jc;
    } else {
        // Miller's downward recurrence.
        const int top = n + 20 + static_cast<int>(std::sqrt(40.0 * (n + w)));
        double fp = 0.0, f = 1e-30, fn = 0.0, f1 = 0.0, f0 = 0.0;
        for (int k = top; k >= 1; --k) {
            const double fm = (2.0 * k + 1.0) / w * f - fp;
            fp = f;
            f = fm;
            if (k - 1 == n) fn = f;
            if (k - 1 == 1) f1 = f;
            if (std::abs(f) > 1e200) {
                f *= 1e-200;
                fp *= 1e-200;
                fn *= 1e-200;
                f1 *= 1e-200;
            }
        }
        f0 = f;
        const double scale = (f0 * j0 + f1 * j1) / (f0 * f0 + f1 * f1);
        j = fn * scale;
    }
    return {j, y};
}

TalbotContour make_talbot_contour(double t, int node_count) {
    if (!(t > 0.0)) throw DomainError("talbot: t must be positive");
    if (node_count < 8 || node_count % 2) throw DomainError("talbot: node_count must be even and >= 8");

    // Optimised cotangent contour.
    constexpr double c0 = -0.6122, c1 = 0.5017, c2 = 0.6407, c3 = 0.2645;
    TalbotContour tc;
    tc.node_count = node_count;
    tc.time_scale = t;
    const double scale = node_count / t;
    const double h = 2.0 * std::numbers::pi / node_count;
    for (int k = node_count / 2; k < node_count; ++k) {
        const double phi = -std::numbers::pi + (k + 0.5) * h;
        const double cp = std::cos(c2 * phi), sp = std::sin(c2 * phi);
        const double cot = cp / sp;
        const cplx s = scale * cplx(c0 + c1 * phi * cot, c3 * phi);
        const cplx ds = scale * cplx(c1 * cot - c1 * c2 * phi / (sp * sp), c3);
        tc.nodes.push_back(s);
        tc.weights.push_back(std::exp(s * t) * ds / cplx(0.0, double(node_count)));
    }
    return tc;
}

double talbot_invert(const std::function<cplx(cplx)>& transform, const TalbotContour& contour) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < contour.nodes.size(); ++k)
        acc += contour.weights[k] * transform(contour.nodes[k]);
    const double r = 2.0 * acc.real();
    if (!std::isfinite(r)) throw NumericalError("talbot_invert: non-finite result");
    return r;
}

double talbot_invert(const std::function<cplx(cplx)>& transform, double t, int node_count) {
    return talbot_invert(transform, make_talbot_contour(t, node_count));
}

}  // namespace kmc::specfun
