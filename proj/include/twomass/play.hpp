#pragma once

#include <stdexcept>

namespace twomass {

/// Kinematic play (backlash) operator: the load position follows the
/// motor position only while a gap boundary is pushed. Requires the
/// inputs to be a consistent play state, |x_m_prev - x_L_prev| <= beta.
double play_step(double x_L_prev, double x_m_prev, double x_m_new, double beta);

} // namespace twomass
