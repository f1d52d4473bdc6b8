#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ebsc/model.hpp"

namespace ebsc {

// Backward matrix Riccati solution: Theta at every grid knot, Theta(T) = 0,
// each value symmetric positive semi-definite.
struct RiccatiSolution {
    std::vector<Eigen::MatrixXd> theta;
    const Eigen::MatrixXd& at(int knot) const { return theta.at(knot); }
    int n_knots() const { return int(theta.size()); }
};

// Integrates
//   dTheta/dt = A Theta + Theta A' + Theta H Theta
//               - B (R + sigma^2/2 I)^{-1} B' - C (I + Theta N)^{-1} Theta C',
//   Theta(T) = 0,
// backward with classical RK4 on the model grid, symmetrizing after each
// step. Throws SingularResolvent / BlowUp / NonPSD on failure.
RiccatiSolution solve_riccati(const ValidatedModel& m);

}  // namespace ebsc
