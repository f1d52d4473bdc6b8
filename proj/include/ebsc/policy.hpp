#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ebsc/model.hpp"

namespace ebsc {

// Feedback law of the relaxed control: action ~ N(K_t P_t + shift_t, Sigma_t).
// The optimal rule has Sigma_t = (sigma^2/2)(R_t + sigma^2/2 I)^{-1},
// K_t = -(R_t + sigma^2/2 I)^{-1} B_t' and zero shift; nonzero shifts exist
// for perturbation experiments.
struct GaussianPolicyRule {
    std::vector<Eigen::MatrixXd> Sigma;       // p x p per knot
    std::vector<Eigen::MatrixXd> gain;        // p x n per knot
    std::vector<Eigen::VectorXd> mean_shift;  // p per knot

    int n_knots() const { return int(Sigma.size()); }
    Eigen::VectorXd mean(int knot, const Eigen::VectorXd& P) const {
        return gain[knot] * P + mean_shift[knot];
    }
};

// Builds the optimal rule. StandardGaussian reference uses
// Sigma = (sigma^2/2)(R + sigma^2/2 I)^{-1}; the flat (U = 0) reference uses
// Sigma = (sigma^2/2) R^{-1} and requires R strictly positive definite.
GaussianPolicyRule optimal_policy_rule(const ValidatedModel& m);

// Quadratic-in-action flat derivative of the drift Hamiltonian with an
// optional first-moment coupling:
//   dH(mu)(a) = c0 + c1 a + c2 a^2 + d1 * mean(mu) * a.
// The LQ instance has c1 = P'B, c2 = R/2, d1 = 0.
struct HamiltonianDerivativeSpec {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double d1 = 0.0;

    double eval(double a, double mean) const {
        return c0 + (c1 + d1 * mean) * a + c2 * a * a;
    }
};

struct LagrangeReport {
    double beta = 0.0;
    double residual_sup = 0.0;
};

// Normalized Gibbs density mu(a) ~ exp(-U(a) - (2/sigma^2) h(a)) on the grid;
// normalization by max-exponent shift followed by trapezoid quadrature.
// Rejects grids whose boundary carries visible mass.
GridDensity gibbs_density(const ControlGrid& grid, const std::vector<double>& h_values,
                          const std::vector<double>& u_values, double sigma);

// Multiplier beta = (sigma^2/2)(ln Z - 1) with Z the same trapezoid
// normalizer, plus the sup-norm of the first-order condition
//   h + (sigma^2/2)(U + ln mu + 1) + beta
// over the grid points carrying positive density.
LagrangeReport lagrange_beta(const ControlGrid& grid, const std::vector<double>& h_values,
                             const std::vector<double>& u_values, double sigma);

struct FixedPointResult {
    GridDensity density;
    int iterations = 0;
    double last_gap = 0.0;  // L1 distance between the final iterates
};

// Damped iteration mu <- (1-lambda) mu + lambda Gibbs(mu), started from the
// prior e^{-U}, stopped when the L1 grid distance between iterates drops
// below tol. Throws NoConvergence after max_iter sweeps.
FixedPointResult gibbs_fixed_point(const HamiltonianDerivativeSpec& spec, const ControlGrid& grid,
                                   const ReferenceMeasure& ref, double sigma, double damping,
                                   double tol, int max_iter);

}  // namespace ebsc
