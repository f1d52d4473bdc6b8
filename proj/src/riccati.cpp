#include "ebsc/riccati.hpp"

namespace ebsc {

namespace {

Eigen::MatrixXd riccati_rhs(const ValidatedModel& m, int knot, const Eigen::MatrixXd& theta) {
    const auto& A = m.A(knot);
    const auto& B = m.B(knot);
    const auto& C = m.C(knot);
    const auto& H = m.H(knot);
    const auto& N = m.N(knot);
    const Eigen::MatrixXd resolvent =
        la::resolvent_inverse(theta * N, "riccati.solve_riccati");
    return A * theta + theta * A.transpose() + theta * H * theta -
           B * m.R_eff_inv(knot) * B.transpose() -
           C * resolvent * theta * C.transpose();
}

}  // namespace

RiccatiSolution solve_riccati(const ValidatedModel& m) {
    const std::string origin = "riccati.solve_riccati";
    const int K = m.grid().n_steps;
    const double dt = m.grid().dt();

    RiccatiSolution sol;
    sol.theta.resize(K + 1);
    sol.theta[K] = Eigen::MatrixXd::Zero(m.n(), m.n());

    for (int k = K - 1; k >= 0; --k) {
        // coefficients frozen at the left knot of [t_k, t_{k+1}]
        const Eigen::MatrixXd& th = sol.theta[k + 1];
        const double h = -dt;
        const Eigen::MatrixXd k1 = riccati_rhs(m, k, th);
        const Eigen::MatrixXd k2 = riccati_rhs(m, k, th + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = riccati_rhs(m, k, th + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = riccati_rhs(m, k, th + h * k3);
        sol.theta[k] = la::symmetrize(th + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));

        if (!sol.theta[k].allFinite())
            throw NumericalError(ErrorCode::NaNEncountered, origin,
                                 "non-finite Theta at t=" + std::to_string(m.grid().knot(k)));
        if (sol.theta[k].norm() > 1e8)
            throw NumericalError(ErrorCode::BlowUp, origin,
                                 "||Theta|| exceeds 1e8 at t=" + std::to_string(m.grid().knot(k)));
        if (!la::is_psd(sol.theta[k]))
            throw NumericalError(ErrorCode::NonPSD, origin,
                                 "Theta lost positive semi-definiteness at t=" +
                                     std::to_string(m.grid().knot(k)));
    }
    return sol;
}

}  // namespace ebsc
