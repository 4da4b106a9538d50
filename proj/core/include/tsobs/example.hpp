#pragma once

#include "tsobs/lmi.hpp"
#include "tsobs/simulator.hpp"
#include "tsobs/tsmodel.hpp"

namespace tsobs::example {

// Three-state benchmark with one multiplicative parameter:
//   x1' = -0.7 x1^2 - x2 + x3 + (1 - 0.8 x1) theta
//   x2' = -x1 x3 - 2 x2 + (x2 + u) theta
//   x3' = 0.5 x1 - 2 x3 + u
//   y = (x1 + x2, x2)
// written affine in the premise z = x1 = y1 - y2 on the sector (0, 2).
ParamAffineModel param_affine_model();

// Published vertex matrices of the sector decomposition above.
struct ReferenceMatrices {
    Matrix A1, A2, A_bar, B, B_bar, F_bar, C;
};
ReferenceMatrices reference_matrices();

// theta_bar = 0.5, rho = 1, min_beta.
DesignSpec design_spec();

// 100 s at dt = 1e-3; theta = 0.5 switching to 0.3 at t = 50 s; multisine input
// 1 + 0.5 sin(2 pi 0.1 t) + 0.5 sin(2 pi 0.37 t).
SimScenario scenario();

}  // namespace tsobs::example
