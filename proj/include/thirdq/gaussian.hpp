#pragma once

#include <cmath>

namespace thirdq::analysis {

/// Gaussian lineshape V(delta) = peak * exp(-(delta-center)^2 / (2 width^2)) + baseline.
/// Width is the Gaussian sigma; detunings in GHz, voltages in volts.
struct GaussianModel {
    double peak = 0.0;      // V
    double center = 0.0;    // GHz
    double width = 1.0;     // GHz, > 0
    double baseline = 0.0;  // V

    double operator()(double delta) const {
        const double z = (delta - center) / width;
        return peak * std::exp(-0.5 * z * z) + baseline;
    }
};

}  // namespace thirdq::analysis
