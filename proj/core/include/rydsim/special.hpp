#pragma once

namespace rydsim {

// Bessel function of the first kind J_n(x), integer order, any sign of n and x.
double bessel_jn(int n, double x);

// cos(pi*x) with the half-integer zeros exact: cospi(0.5) == 0.0, cospi(1.5) == 0.0.
double cospi(double x);

} // namespace rydsim
