#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace kmc::specfun {

using cplx = std::complex<double>;

// Inverse complementary error function on (0, 2).
double erfc_inv(double y);

// Scaled complementary error function erfc(x) exp(x^2).
double erfcx(double x);

// CDF of the first exit time from a reflecting-base hemisphere, in the
// dimensionless time tau = pi^2 D t / R^2.
double hemisphere_exit_cdf(double tau);
// The two series representations; each is valid for every tau > 0 but
// converges quickly only on its own side of tau = 1.
double hemisphere_exit_cdf_large_tau(double tau);
double hemisphere_exit_cdf_small_tau(double tau);

// [P_0(x), ..., P_{n_max}(x)].
std::vector<double> legendre_sequence(double x, int n_max);
void legendre_fill(double x, int n_max, double* out);

// k_n(alpha R) / k_n(alpha) for the modified spherical Bessel function of the
// second kind, evaluated from the terminating polynomial form.
cplx kn_ratio(int n, cplx alpha, double R);

// (j_n(w), y_n(w)).
std::pair<double, double> sph_bessel_jy(int n, double w);

struct TalbotContour {
    int node_count = 0;
    double time_scale = 0.0;
    std::vector<cplx> nodes;
    // Already include exp(s t) and ds/dphi.
    std::vector<cplx> weights;
};

// Nodes on the upper half of the contour only (Im s > 0); the lower half is
// the complex conjugate and real-valued transforms need just these.
TalbotContour make_talbot_contour(double t, int node_count = 24);

double talbot_invert(const std::function<cplx(cplx)>& transform, double t, int node_count = 24);
double talbot_invert(const std::function<cplx(cplx)>& transform, const TalbotContour& contour);

}  // namespace kmc::specfun

namespace kmc::specfun {
// dF_T/dtau.
double hemisphere_exit_pdf(double tau);
}  // namespace kmc::specfun
