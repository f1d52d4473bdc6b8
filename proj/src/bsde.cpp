#include "ebsc/bsde.hpp"

#include "ebsc/rng.hpp"

namespace ebsc {

namespace {

// Theta is known at knots only; interpolate linearly for the RK4 interior
// stages. Model coefficients stay frozen at the left knot.
struct PhiRhs {
    const ValidatedModel& m;
    const RiccatiSolution& th;
    int knot;

    Eigen::MatrixXd theta_at(double s) const {  // s in [0,1] across the step
        return (1.0 - s) * th.at(knot) + s * th.at(knot + 1);
    }

    void eval(double s, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
              Eigen::VectorXd& dalpha, Eigen::VectorXd& dbeta) const {
        const Eigen::MatrixXd theta = theta_at(s);
        const Eigen::MatrixXd drift = m.A(knot) + theta * m.H(knot);
        const Eigen::MatrixXd resolvent =
            la::resolvent_inverse(theta * m.N(knot), "bsde.solve_phi");
        dbeta = drift * beta;
        dalpha = drift * alpha + m.C(knot) * resolvent * beta;
    }
};

}  // namespace

PhiSolution solve_phi(const ValidatedModel& m, const RiccatiSolution& th) {
    if (th.n_knots() != m.grid().n_knots())
        throw NumericalError(ErrorCode::GridMismatch, "bsde.solve_phi",
                             "Riccati solution computed on a different grid");
    const int K = m.grid().n_steps;
    const double dt = m.grid().dt();

    PhiSolution sol;
    sol.alpha.resize(K + 1);
    sol.beta.resize(K + 1);
    sol.alpha[K] = m.terminal().c;
    sol.beta[K] = m.terminal().brownian_loading(m.n());

    Eigen::VectorXd da1, db1, da2, db2, da3, db3, da4, db4;
    for (int k = K - 1; k >= 0; --k) {
        const PhiRhs rhs{m, th, k};
        const double h = -dt;
        const Eigen::VectorXd& a = sol.alpha[k + 1];
        const Eigen::VectorXd& b = sol.beta[k + 1];
        rhs.eval(1.0, a, b, da1, db1);
        rhs.eval(0.5, a + 0.5 * h * da1, b + 0.5 * h * db1, da2, db2);
        rhs.eval(0.5, a + 0.5 * h * da2, b + 0.5 * h * db2, da3, db3);
        rhs.eval(0.0, a + h * da3, b + h * db3, da4, db4);
        sol.alpha[k] = a + (h / 6.0) * (da1 + 2.0 * da2 + 2.0 * da3 + da4);
        sol.beta[k] = b + (h / 6.0) * (db1 + 2.0 * db2 + 2.0 * db3 + db4);
        if (!sol.alpha[k].allFinite() || !sol.beta[k].allFinite())
            throw NumericalError(ErrorCode::NaNEncountered, "bsde.solve_phi",
                                 "non-finite phi coefficients at t=" +
                                     std::to_string(m.grid().knot(k)));
    }
    return sol;
}

LinearDriftSpec phi_drift_spec(const ValidatedModel& m, const RiccatiSolution& th) {
    LinearDriftSpec spec;
    spec.F = [&m, &th](int k) -> Eigen::MatrixXd { return m.A(k) + th.at(k) * m.H(k); };
    spec.Gz = [&m, &th](int k) -> Eigen::MatrixXd {
        return m.C(k) * la::resolvent_inverse(th.at(k) * m.N(k), "bsde.phi_drift_spec");
    };
    spec.k = [&m](int) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(m.n()); };
    return spec;
}

RegressionSolution solve_linear_bsde_regression(
    const ValidatedModel& m, const LinearDriftSpec& drift,
    const std::function<Eigen::VectorXd(double w_T)>& terminal, int n_paths, int basis_degree,
    std::uint64_t seed) {
    const std::string origin = "bsde.solve_linear_bsde_regression";
    if (n_paths < 1000)
        throw NumericalError(ErrorCode::InvalidArgument, origin, "need n_paths >= 1000");
    if (basis_degree < 1)
        throw NumericalError(ErrorCode::InvalidArgument, origin, "need basis_degree >= 1");

    const int K = m.grid().n_steps;
    const int nk = K + 1;
    const int n = m.n();
    const double dt = m.grid().dt();
    const double sq_dt = std::sqrt(dt);

    RegressionSolution sol;
    sol.n_paths = n_paths;
    sol.n = n;
    sol.grid = m.grid();
    sol.w.assign(std::size_t(n_paths) * nk, 0.0);
    sol.y.assign(std::size_t(n_paths) * nk * n, 0.0);
    sol.z.assign(std::size_t(n_paths) * nk * n, 0.0);
    sol.step_residual.assign(K, 0.0);

    // forward Brownian sweep
    std::vector<double> dw(std::size_t(n_paths) * K);
    for (int i = 0; i < n_paths; ++i) {
        double w = 0.0;
        for (int k = 0; k < K; ++k) {
            const double inc =
                sq_dt * rng::normal(seed, rng::Stream::Regression, std::uint64_t(i), std::uint64_t(k));
            dw[std::size_t(i) * K + k] = inc;
            w += inc;
            sol.w[std::size_t(i) * nk + k + 1] = w;
        }
    }

    auto y_at = [&](int i, int k) {
        return Eigen::Map<Eigen::VectorXd>(sol.y.data() + (std::size_t(i) * nk + k) * n, n);
    };
    auto z_at = [&](int i, int k) {
        return Eigen::Map<Eigen::VectorXd>(sol.z.data() + (std::size_t(i) * nk + k) * n, n);
    };

    for (int i = 0; i < n_paths; ++i) y_at(i, K) = terminal(sol.w[std::size_t(i) * nk + K]);

    const int q = basis_degree + 1;
    Eigen::MatrixXd basis(n_paths, q);
    Eigen::MatrixXd targets(n_paths, 2 * n);  // [Y_{k+1}, Y_{k+1} dW]

    for (int k = K - 1; k >= 0; --k) {
        for (int i = 0; i < n_paths; ++i) {
            const double wv = sol.w[std::size_t(i) * nk + k];
            double pw = 1.0;
            for (int j = 0; j < q; ++j) {
                basis(i, j) = pw;
                pw *= wv;
            }
            const double inc = dw[std::size_t(i) * K + k];
            for (int c = 0; c < n; ++c) {
                const double ynext = sol.y[(std::size_t(i) * nk + k + 1) * n + c];
                targets(i, c) = ynext;
                targets(i, n + c) = ynext * inc;
            }
        }

        Eigen::MatrixXd coef;
        if (k == 0) {
            // all paths share W_0 = 0: conditional expectation is the plain mean
            coef = Eigen::MatrixXd::Zero(q, 2 * n);
            coef.row(0) = targets.colwise().mean();
        } else {
            const Eigen::MatrixXd gram = basis.transpose() * basis;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues().minCoeff();
            const double hi = es.eigenvalues().maxCoeff();
            if (!(lo > 0.0) || hi / lo > 1e10)
                throw NumericalError(ErrorCode::IllConditionedRegression, origin,
                                     "normal matrix condition exceeds 1e10 at t=" +
                                         std::to_string(m.grid().knot(k)));
            coef = gram.ldlt().solve(basis.transpose() * targets);
        }

        const Eigen::MatrixXd fitted = basis * coef;
        sol.step_residual[std::size_t(k)] =
            (targets - fitted).squaredNorm() / double(n_paths);

        const Eigen::MatrixXd Fk = drift.F(k);
        const Eigen::MatrixXd Gk = drift.Gz(k);
        const Eigen::VectorXd kk = drift.k(k);
        for (int i = 0; i < n_paths; ++i) {
            const Eigen::VectorXd ey = fitted.row(i).head(n);
            const Eigen::VectorXd zk = fitted.row(i).tail(n) / dt;
            z_at(i, k) = zk;
            y_at(i, k) = ey - dt * (Fk * ey + Gk * zk + kk);
        }
    }
    return sol;
}

}  // namespace ebsc
