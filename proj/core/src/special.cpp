#include "rydsim/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

namespace rydsim {

double bessel_jn(int n, double x) {
    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;
    gsl_sf_result res;
    const int status = gsl_sf_bessel_Jn_e(n, x, &res);
    if (status == GSL_EUNDRFLW) return 0.0;
    if (status != GSL_SUCCESS)
        throw std::runtime_error("bessel_jn(" + std::to_string(n) + ", " +
                                 std::to_string(x) + "): " + gsl_strerror(status));
    return res.val;
}

double cospi(double x) {
    x = std::fabs(std::fmod(x, 2.0)); // cos(pi x) has period 2 and is even
    if (x > 1.0) x = 2.0 - x;
    // fold to [0, 1/2]; x = 1/2 maps to an exact zero
    double sign = 1.0;
    if (x > 0.5) {
        x = 1.0 - x;
        sign = -1.0;
    }
    if (x == 0.5) return 0.0;
    return sign * std::cos(M_PI * x);
}

} // namespace rydsim
