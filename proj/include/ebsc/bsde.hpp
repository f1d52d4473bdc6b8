#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "ebsc/model.hpp"
#include "ebsc/riccati.hpp"

namespace ebsc {

// Affine solution of the decoupling BSDE: phi_t = alpha_t + beta_t W_t,
// eta_t = beta_t. beta vanishes identically for deterministic terminal data.
struct PhiSolution {
    std::vector<Eigen::VectorXd> alpha;
    std::vector<Eigen::VectorXd> beta;
    int n_knots() const { return int(alpha.size()); }

    Eigen::VectorXd phi(int knot, double w) const { return alpha[knot] + beta[knot] * w; }
    const Eigen::VectorXd& eta(int knot) const { return beta[knot]; }
};

// Solves d phi = ((A + Theta H) phi + C (I + Theta N)^{-1} eta) dt + eta dW,
// phi_T = xi, for xi = c + q W_T, via the backward ODE pair
//   beta' = (A + Theta H) beta,                      beta_T = q,
//   alpha' = (A + Theta H) alpha + C (I+Theta N)^{-1} beta,  alpha_T = c.
PhiSolution solve_phi(const ValidatedModel& m, const RiccatiSolution& th);

// ---------------------------------------------------------------------------
// Regression cross-check solver for linear BSDEs
//   dY = (F(t) Y + Gz(t) Z + k(t)) dt + Z dW,  Y_T = xi(W_T),
// backward Euler with conditional expectations fitted by polynomial
// least squares on W_t. Kept independent of the ansatz path above.

struct LinearDriftSpec {
    std::function<Eigen::MatrixXd(int knot)> F;   // n x n
    std::function<Eigen::MatrixXd(int knot)> Gz;  // n x n
    std::function<Eigen::VectorXd(int knot)> k;   // n
};

struct RegressionSolution {
    int n_paths = 0;
    int n = 0;
    std::vector<double> w;  // (path, knot)
    std::vector<double> y;  // (path, knot, i)
    std::vector<double> z;  // (path, knot, i)
    std::vector<double> step_residual;  // mean squared regression residual per step
    TimeGrid grid;

    double W(int path, int knot) const { return w[std::size_t(path) * grid.n_knots() + knot]; }
    Eigen::Map<const Eigen::VectorXd> Y(int path, int knot) const {
        return {y.data() + (std::size_t(path) * grid.n_knots() + knot) * n, n};
    }
    Eigen::Map<const Eigen::VectorXd> Z(int path, int knot) const {
        return {z.data() + (std::size_t(path) * grid.n_knots() + knot) * n, n};
    }
};

RegressionSolution solve_linear_bsde_regression(
    const ValidatedModel& m, const LinearDriftSpec& drift,
    const std::function<Eigen::VectorXd(double w_T)>& terminal, int n_paths, int basis_degree,
    std::uint64_t seed);

// Drift spec reproducing the phi-BSDE, for ansatz/regression cross-checks.
LinearDriftSpec phi_drift_spec(const ValidatedModel& m, const RiccatiSolution& th);

}  // namespace ebsc
