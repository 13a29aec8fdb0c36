#include "ringsim/sim_core.hpp"

#include <cmath>

namespace ringsim {

double Rng::exponential(double mean) { return -mean * std::log1p(-uniform01()); }

}  // namespace ringsim
