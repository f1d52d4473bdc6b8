#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ebsc/model.hpp"
#include "ebsc/policy.hpp"
#include "ebsc/simulate.hpp"

namespace ebsc {

// Cost estimate split into its running/endpoint pieces. total is the sum of
// the components by construction; std_error and n_paths are zero on the
// quadrature path. coe carries the exploration part (tr(Sigma R)/2
// integrated) alongside whichever estimate produced the report.
struct CostReport {
    double total = 0.0;
    double state_cost = 0.0;
    double control_cost = 0.0;
    double z_cost = 0.0;
    double entropy_cost = 0.0;
    double endpoint_cost = 0.0;
    double std_error = 0.0;
    int n_paths = 0;
    double coe = 0.0;

    double component_sum() const {
        return state_cost + control_cost + z_cost + entropy_cost + endpoint_cost;
    }
};

// Exact cost of a Gaussian policy with deterministic mean path v_t and
// covariance path Sigma_t. The state admits the affine form Y = a + b W, so
// every expectation is closed-form per knot; time integrals are composite
// trapezoid. Requires an affine terminal condition and the StandardGaussian
// reference.
CostReport cost_quadrature(const ValidatedModel& m, const std::vector<Eigen::VectorXd>& v_path,
                           const std::vector<Eigen::MatrixXd>& sigma_path);

struct MonteCarloOptions {
    // When positive, the quadratic control cost is estimated from sampled
    // actions instead of the analytic v'Rv + tr(R Sigma); validation only.
    int action_samples = 0;
    std::uint64_t action_seed = 0;
};

// Path-wise cost of a feedback rule over a simulated ensemble, averaged with
// a standard error.
CostReport cost_monte_carlo(const ValidatedModel& m, const SimulatedEnsemble& ens,
                            const GaussianPolicyRule& rule, const MonteCarloOptions& opt = {});

// COE = (1/2) \int tr(Sigma_t R_t) dt by composite trapezoid.
double cost_of_exploration(const ValidatedModel& m, const std::vector<Eigen::MatrixXd>& sigma_path);

// Deterministic mean of the adjoint: E[P_t]' = -(A' + H Theta) E[P] - H alpha,
// E[P_0] = P_0. Gives the deterministic-mean projection of the optimal policy.
std::vector<Eigen::VectorXd> mean_adjoint_path(const ValidatedModel& m, const RiccatiSolution& th,
                                               const PhiSolution& ph);

}  // namespace ebsc
