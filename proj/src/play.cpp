#include "twomass/play.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twomass {

double play_step(double x_L_prev, double x_m_prev, double x_m_new, double beta) {
    if (!(beta >= 0.0))
        throw std::invalid_argument("play_step: beta must be non-negative");
    // Tolerate a few ulps of drift on the boundary, reject real violations.
    double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                   std::max({1.0, std::abs(x_m_prev), std::abs(x_L_prev), beta});
    if (std::abs(x_m_prev - x_L_prev) > beta + slack)
        throw std::invalid_argument("play_step: inconsistent state, |x_m_prev - x_L_prev| > beta");
    return std::clamp(x_L_prev, x_m_new - beta, x_m_new + beta);
}

} // namespace twomass
