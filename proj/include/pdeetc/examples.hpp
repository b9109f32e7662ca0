#pragma once

#include "pdeetc/mnn.hpp"
#include "pdeetc/pde_sim.hpp"

namespace pdeetc {

/// Catalytic-rod plant on [0, pi]: diffusion 1, f(x) = 1.65 x + 1.5 x^2.
PlantModel example1_plant(double D1 = 0.1);
/// Traffic-density plant: diffusion 0.5, f(x) = 0.1 x - 0.01 x^2, Example 1 profiles,
/// on the given domain (the bundled configuration uses [0, pi]).
PlantModel example2_plant(Interval domain = {0.0, 3.141592653589793}, double D1 = 0.1);
/// Printed three-decimal network weights of the catalytic-rod example (q = r = 1).
Mnn table1_network();
/// Printed three-decimal network weights of the traffic example (q = r = 1).
Mnn table4_network();

}  // namespace pdeetc
