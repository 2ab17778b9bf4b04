#pragma once

#include "wws/operator.hpp"

namespace wws {

struct ModeOptions {
  double h = 1e-4;  // relative wave-speed step for the centered differences
  ProfileOptions profile;
};

// Generalized kernel of the transformed operator at lambda = 0 and the adjoint modes.
// Vectors in the (eta4, phi4) node basis; primal modes are weighted representatives
// exp(a x) f, adjoint modes are exp(-a x) g, paired by <f, g> = dx g^H f.
struct ModePair {
  CVec z3, y3, z4, y4;
  CVec z3_star, y3_star, z4_star, y4_star;
  double residual_z = 0.0;  // ||A z4|| / ||z4||
  double residual_y = 0.0;  // ||A y4 + z4|| / ||z4||
  Eigen::Matrix2cd pairing; // [[<z4,z4*>, <y4,z4*>], [<z4,y4*>, <y4,y4*>]]
  double pairing_cond = 0.0;      // of the pairing between unit-normalized modes
  double pairing_cond_raw = 0.0;  // of the pairing matrix as built
  double adjoint_residual_z = 0.0;  // ||A^H z4*|| / ||z4*||
  double adjoint_residual_y = 0.0;  // ||A^H y4* - z4*|| / ||z4*||
  double edge_constant_gap = 0.0;  // |(Phi- minus Phi+) - integral of omega|
};

// The wave-speed derivative uses the profile family at gamma = gamma_hat / (1 +- h)^2 on
// the same unscaled grid. A flat profile yields zero modes.
ModePair neutral_modes(const WaveProfile& profile, const LinearizedOperator& op, const ModeOptions& opts = {});

cplx pairing(const CVec& f, const CVec& g, double dx);

// z minus its component along span{z4, y4}, fixed by annihilation by z4*, y4*.
CVec symplectic_project(const CVec& z, const ModePair& modes, double dx);

struct PhysicalPairing {
  cplx transformed;  // -<zdot3, z3*>
  double physical;   // integral of eta_dot phi_x - phi_dot eta_x over the physical period
};
// Random localized Gaussian sums (eta_dot, phi_dot) on the physical line, mapped to the
// (eta3, phi3) variables with the stretch evaluated in closed form.
PhysicalPairing physical_pairing_check(const WaveProfile& profile, const ModePair& modes, const WeightParams& w,
                                       unsigned long seed);

}  // namespace wws
