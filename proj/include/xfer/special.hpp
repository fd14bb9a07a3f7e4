#pragma once

namespace xfer {

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

// Upper tail P(F > f) of the F(d1, d2) distribution.
double f_distribution_sf(double f, double d1, double d2);

}  // namespace xfer
