#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ebsc/bsde.hpp"
#include "ebsc/model.hpp"
#include "ebsc/policy.hpp"
#include "ebsc/riccati.hpp"

namespace ebsc {

// Generation metadata: increments are N(0, dt), reproducible from
// (seed, path, step) via the counter RNG regardless of worker count.
struct BrownianPaths {
    std::uint64_t seed = 0;
    int n_paths = 0;
    TimeGrid grid;

    double increment(int path, int step) const;
};

// Monte-Carlo paths of the Hamiltonian system. P and W are stored; Y, Z and
// the policy mean v are reconstructions through the referenced Theta/phi
// solutions:
//   Y = Theta P + phi,
//   Z = (I + Theta N)^{-1} (eta - Theta C' P),
//   v = -(R + sigma^2/2 I)^{-1} B' P.
class SimulatedEnsemble {
  public:
    const ValidatedModel& model() const { return model_; }
    const RiccatiSolution& theta() const { return theta_; }
    const PhiSolution& phi() const { return phi_; }
    const BrownianPaths& brownian() const { return brownian_; }
    int n_paths() const { return brownian_.n_paths; }
    int n_knots() const { return model_.grid().n_knots(); }

    double W(int path, int knot) const {
        return w_[std::size_t(path) * n_knots() + knot];
    }
    Eigen::Map<const Eigen::VectorXd> P(int path, int knot) const {
        return {p_.data() + (std::size_t(path) * n_knots() + knot) * model_.n(), model_.n()};
    }
    Eigen::VectorXd Y(int path, int knot) const {
        return theta_.at(knot) * P(path, knot) + phi_.phi(knot, W(path, knot));
    }
    Eigen::VectorXd Z(int path, int knot) const {
        return z_offset_[knot] + z_gain_[knot] * P(path, knot);
    }
    Eigen::VectorXd v(int path, int knot) const { return v_gain_[knot] * P(path, knot); }

    const Eigen::MatrixXd& v_gain(int knot) const { return v_gain_[knot]; }

    friend SimulatedEnsemble simulate_hamiltonian_system(const ValidatedModel& m,
                                                         const RiccatiSolution& th,
                                                         const PhiSolution& ph, int n_paths,
                                                         std::uint64_t seed, unsigned n_threads);

  private:
    ValidatedModel model_;
    RiccatiSolution theta_;
    PhiSolution phi_;
    BrownianPaths brownian_;
    std::vector<double> w_;  // (path, knot)
    std::vector<double> p_;  // (path, knot, i)
    // per-knot reconstruction caches
    std::vector<Eigen::VectorXd> z_offset_;  // (I+Theta N)^{-1} eta
    std::vector<Eigen::MatrixXd> z_gain_;    // -(I+Theta N)^{-1} Theta C'
    std::vector<Eigen::MatrixXd> v_gain_;    // -(R + sigma^2/2 I)^{-1} B'
};

// Euler-Maruyama for the adjoint SDE
//   dP = -(A' P + H (Theta P + phi)) dt - (C' P + N Z) dW,
//   P_0 = -G (I + Theta_0 G)^{-1} phi_0,
// followed by the reconstructions above.
SimulatedEnsemble simulate_hamiltonian_system(const ValidatedModel& m, const RiccatiSolution& th,
                                              const PhiSolution& ph, int n_paths,
                                              std::uint64_t seed, unsigned n_threads = 0);

// Draws n_samples actions from N(v_t, Sigma_t) at one (path, knot) state.
// Throws NonSPD when Sigma_t fails the Cholesky factorization.
Eigen::MatrixXd sample_policy_actions(const SimulatedEnsemble& ens, const GaussianPolicyRule& rule,
                                      int path, int knot, int n_samples, std::uint64_t seed);

// Diagnostics for the decoupling identity: steps the state BSDE forward with
// drift A Y + B v + C Z using the reconstructed Z and the ensemble's own
// increments, and reports the strong deviation from the reconstructed Y.
struct ForwardConsistency {
    double sup_mean_sq_gap = 0.0;   // max_k mean_i |Ytilde - Y|^2
    double terminal_mean_sq = 0.0;  // mean_i |Ytilde_T - xi|^2
};
ForwardConsistency forward_euler_state_check(const SimulatedEnsemble& ens);

}  // namespace ebsc
