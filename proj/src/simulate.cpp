#include "ebsc/simulate.hpp"

#include "ebsc/rng.hpp"

namespace ebsc {

double BrownianPaths::increment(int path, int step) const {
    return std::sqrt(grid.dt()) *
           rng::normal(seed, rng::Stream::Brownian, std::uint64_t(path), std::uint64_t(step));
}

SimulatedEnsemble simulate_hamiltonian_system(const ValidatedModel& m, const RiccatiSolution& th,
                                              const PhiSolution& ph, int n_paths,
                                              std::uint64_t seed, unsigned n_threads) {
    const std::string origin = "simulate.simulate_hamiltonian_system";
    if (th.n_knots() != m.grid().n_knots() || ph.n_knots() != m.grid().n_knots())
        throw NumericalError(ErrorCode::GridMismatch, origin,
                             "Theta and phi must be computed on the model grid");
    if (n_paths < 1)
        throw NumericalError(ErrorCode::InvalidArgument, origin, "need n_paths >= 1");

    const int n = m.n();
    const int K = m.grid().n_steps;
    const int nk = K + 1;
    const double dt = m.grid().dt();

    SimulatedEnsemble ens;
    ens.model_ = m;
    ens.theta_ = th;
    ens.phi_ = ph;
    ens.brownian_ = BrownianPaths{seed, n_paths, m.grid()};
    ens.w_.assign(std::size_t(n_paths) * nk, 0.0);
    ens.p_.assign(std::size_t(n_paths) * nk * n, 0.0);

    // Reconstruction caches and the affine pieces of the Euler step:
    //   drift    = Dm P + d0 + dW_coef * W
    //   diffusion = Sm P + s0
    ens.z_offset_.resize(nk);
    ens.z_gain_.resize(nk);
    ens.v_gain_.resize(nk);
    std::vector<Eigen::MatrixXd> Dm(nk), Sm(nk);
    std::vector<Eigen::VectorXd> d0(nk), dW_coef(nk), s0(nk);
    for (int k = 0; k < nk; ++k) {
        const Eigen::MatrixXd resolvent = la::resolvent_inverse(th.at(k) * m.N(k), origin);
        ens.z_offset_[k] = resolvent * ph.eta(k);
        ens.z_gain_[k] = -resolvent * th.at(k) * m.C(k).transpose();
        ens.v_gain_[k] = -m.R_eff_inv(k) * m.B(k).transpose();
        Dm[k] = -(m.A(k).transpose() + m.H(k) * th.at(k));
        d0[k] = -m.H(k) * ph.alpha[k];
        dW_coef[k] = -m.H(k) * ph.beta[k];
        Sm[k] = -(m.C(k).transpose() + m.N(k) * ens.z_gain_[k]);
        s0[k] = -m.N(k) * ens.z_offset_[k];
    }

    const Eigen::MatrixXd resolvent0 =
        la::resolvent_inverse(th.at(0) * m.G(), origin);
    const Eigen::VectorXd p0 = -m.G() * resolvent0 * ph.alpha[0];
    const double sq_dt = std::sqrt(dt);

    auto run_paths = [&](std::size_t lo, std::size_t hi) {
        Eigen::VectorXd P(n), next(n);
        for (std::size_t i = lo; i < hi; ++i) {
            P = p0;
            double w = 0.0;
            Eigen::Map<Eigen::VectorXd>(ens.p_.data() + (i * nk) * n, n) = P;
            for (int k = 0; k < K; ++k) {
                const double dw =
                    sq_dt * rng::normal(seed, rng::Stream::Brownian, std::uint64_t(i),
                                        std::uint64_t(k));
                next = P + dt * (Dm[k] * P + d0[k] + dW_coef[k] * w) + dw * (Sm[k] * P + s0[k]);
                w += dw;
                P = next;
                ens.w_[i * nk + k + 1] = w;
                Eigen::Map<Eigen::VectorXd>(ens.p_.data() + (i * nk + k + 1) * n, n) = P;
            }
        }
    };
    parallel_for(std::size_t(n_paths), run_paths, n_threads);

    for (std::size_t i = 0; i < std::size_t(n_paths) * nk * n; ++i) {
        if (!std::isfinite(ens.p_[i])) {
            const std::size_t cell = i / n;
            throw NumericalError(ErrorCode::NaNEncountered, origin,
                                 "non-finite P at path " + std::to_string(cell / nk) +
                                     ", knot " + std::to_string(cell % nk));
        }
    }
    return ens;
}

Eigen::MatrixXd sample_policy_actions(const SimulatedEnsemble& ens, const GaussianPolicyRule& rule,
                                      int path, int knot, int n_samples, std::uint64_t seed) {
    const std::string origin = "simulate.sample_policy_actions";
    if (rule.n_knots() != ens.n_knots())
        throw NumericalError(ErrorCode::GridMismatch, origin,
                             "policy rule defined on a different grid");
    const int p = int(rule.Sigma[knot].rows());
    Eigen::LLT<Eigen::MatrixXd> llt(rule.Sigma[knot]);
    if (llt.info() != Eigen::Success)
        throw NumericalError(ErrorCode::NonSPD, origin, "Sigma_t is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::VectorXd mean = rule.mean(knot, ens.P(path, knot));

    Eigen::MatrixXd samples(p, n_samples);
    const std::uint64_t lane = (std::uint64_t(path) << 32) ^ std::uint64_t(knot);
    for (int j = 0; j < n_samples; ++j) {
        Eigen::VectorXd u(p);
        for (int c = 0; c < p; ++c)
            u[c] = rng::normal(seed, rng::Stream::Actions, lane,
                               std::uint64_t(j) * p + std::uint64_t(c));
        samples.col(j) = mean + L * u;
    }
    return samples;
}

ForwardConsistency forward_euler_state_check(const SimulatedEnsemble& ens) {
    const ValidatedModel& m = ens.model();
    const int K = m.grid().n_steps;
    const double dt = m.grid().dt();
    const int n = m.n();

    ForwardConsistency out;
    std::vector<double> term(std::size_t(ens.n_paths()));
    std::vector<double> gap(std::size_t(ens.n_paths()));
    std::vector<double> knot_gap(std::size_t(K) + 1, 0.0);

    for (int i = 0; i < ens.n_paths(); ++i) {
        Eigen::VectorXd y = ens.Y(i, 0);
        double sup_gap = 0.0;
        for (int k = 0; k < K; ++k) {
            const Eigen::VectorXd z = ens.Z(i, k);
            const double dw = ens.W(i, k + 1) - ens.W(i, k);
            y += dt * (m.A(k) * y + m.B(k) * ens.v(i, k) + m.C(k) * z) + dw * z;
            const double g = (y - ens.Y(i, k + 1)).squaredNorm();
            knot_gap[std::size_t(k) + 1] += g;
            sup_gap = std::max(sup_gap, g);
        }
        const Eigen::VectorXd xi =
            m.terminal().c + m.terminal().brownian_loading(n) * ens.W(i, K);
        term[std::size_t(i)] = (y - xi).squaredNorm();
        gap[std::size_t(i)] = sup_gap;
    }
    for (double& g : knot_gap) g /= double(ens.n_paths());
    out.sup_mean_sq_gap = *std::max_element(knot_gap.begin(), knot_gap.end());
    out.terminal_mean_sq = pairwise_mean(term);
    return out;
}

}  // namespace ebsc
