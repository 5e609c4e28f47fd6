#pragma once
// specialfn.hpp - incomplete gamma, exponential integral, digamma

namespace rieszgas {

// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt.
// Supports any real a (negative values via the descending recurrence
// Gamma(a,x) = (Gamma(a+1,x) - x^a e^{-x}) / a) and x >= 0 (x > 0 when a <= 0).
double upper_gamma(double a, double x);

// E_1(x) = Gamma(0, x), x > 0.
double exp_integral_e1(double x);

// Digamma psi(x) for x > 0.
double digamma(double x);

}  // namespace rieszgas
