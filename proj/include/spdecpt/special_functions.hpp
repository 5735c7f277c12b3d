#pragma once

#include <functional>

namespace spdecpt {

// Bessel function of the first kind, order zero. Power series for |x| <= 9,
// midpoint rule on (1/pi) int_0^pi cos(x sin t) dt beyond (spectrally
// accurate; node count grows with |x|). Absolute error <= 1e-12 on |x| <= 1e3.
double bessel_j0(double x);

// psi_r(theta2) = 2/sqrt(pi theta2) (1 - e^{-r^2/(4 theta2)}
//                 + r/sqrt(theta2) * int_{r/sqrt(4 theta2)}^inf e^{-x^2} dx),
// evaluated through the complementary error function.
double psi_r(double theta2, double r);

// psi_{r,alpha}(theta2) = 2/(theta2 pi) int_0^inf (1-e^{-x^2}) x^{-1-2a}
//                         (J0(sqrt2 c x) - 2 J0(c x) + 1) dx,  c = r/sqrt(theta2).
// Head integrated adaptively with a series-stabilized J0 combination near 0;
// past x = 7.5 the Gaussian factor is 1 in double precision and the tail is
// an exact power integral plus two Bessel tails summed between consecutive
// zeros with iterated averaging. Relative accuracy rel_tol (default 1e-8).
double psi_r_alpha(double theta2, double r, double alpha,
                   double rel_tol = 1e-8);

// Adaptive Gauss-Kronrod 7-15. Throws QuadratureError when the requested
// tolerance cannot be met within the subdivision budget.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, double rel_tol,
                          int max_intervals = 4000);

}  // namespace spdecpt
