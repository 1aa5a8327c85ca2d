#include "twomass/plant.hpp"

#include <cmath>

namespace twomass {

void PlantParams::validate() const {
    if (!(m > 0.0) || !(M > 0.0))
        throw std::invalid_argument("PlantParams: inertias m, M must be positive");
    if (d < 0.0 || D < 0.0)
        throw std::invalid_argument("PlantParams: viscous coefficients must be non-negative");
    if (f < 0.0 || F < 0.0)
        throw std::invalid_argument("PlantParams: Coulomb levels must be non-negative");
    if (!(beta >= 0.0))
        throw std::invalid_argument("PlantParams: beta must be non-negative");
    if (!(epsilon >= 0.0) || !(epsilon <= 1.0))
        throw std::invalid_argument("PlantParams: epsilon must be in [0,1]");
    if (!(v_stick > 0.0))
        throw std::invalid_argument("PlantParams: v_stick must be positive");
}

double coulomb_force(double v, double applied, double level, double v_stick) {
    if (std::abs(v) > v_stick)
        return level * (v > 0.0 ? 1.0 : -1.0);
    double mag = std::min(std::abs(applied), level);
    if (applied > 0.0) return mag;
    if (applied < 0.0) return -mag;
    return 0.0;
}

} // namespace twomass
