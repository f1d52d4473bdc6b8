#include "ebsc/evaluate.hpp"

#include "ebsc/rng.hpp"

namespace ebsc {

namespace {

void require_standard_gaussian(const ValidatedModel& m, const std::string& origin) {
    if (m.reference().kind != ReferenceMeasure::Kind::StandardGaussian)
        throw NumericalError(ErrorCode::InvalidArgument, origin,
                             "entropy term is closed-form only for the StandardGaussian "
                             "reference; flat priors are limited to the exploration-cost path");
}

struct SigmaCache {
    double trace;
    double log_det;
    double tr_r_sigma;
};

std::vector<SigmaCache> cache_sigma(const ValidatedModel& m,
                                    const std::vector<Eigen::MatrixXd>& sigma_path,
                                    const std::string& origin) {
    if (int(sigma_path.size()) != m.grid().n_knots())
        throw NumericalError(ErrorCode::GridMismatch, origin,
                             "Sigma path must have one value per grid knot");
    std::vector<SigmaCache> out(sigma_path.size());
    for (std::size_t k = 0; k < sigma_path.size(); ++k) {
        const Eigen::MatrixXd& s = sigma_path[k];
        if (s.rows() != m.p() || s.cols() != m.p())
            throw NumericalError(ErrorCode::ShapeMismatch, origin, "Sigma_t must be p x p");
        if (!la::is_spd(la::symmetrize(s)))
            throw NumericalError(ErrorCode::NonSPD, origin,
                                 "Sigma_t not positive definite at t=" +
                                     std::to_string(m.grid().knot(int(k))));
        out[k].trace = s.trace();
        out[k].log_det = la::log_det_spd(la::symmetrize(s), origin);
        out[k].tr_r_sigma = (m.R(int(k)) * s).trace();
    }
    return out;
}

}  // namespace

CostReport cost_quadrature(const ValidatedModel& m, const std::vector<Eigen::VectorXd>& v_path,
                           const std::vector<Eigen::MatrixXd>& sigma_path) {
    const std::string origin = "evaluate.cost_quadrature";
    require_standard_gaussian(m, origin);
    const int K = m.grid().n_steps;
    const int nk = K + 1;
    const double dt = m.grid().dt();
    if (int(v_path.size()) != nk)
        throw NumericalError(ErrorCode::GridMismatch, origin,
                             "mean path must have one value per grid knot");
    const auto sig = cache_sigma(m, sigma_path, origin);

    // state ansatz Y = a + b W: b' = A b (b_T = q), a' = A a + B v + C b (a_T = c)
    std::vector<Eigen::VectorXd> a(nk), b(nk);
    a[K] = m.terminal().c;
    b[K] = m.terminal().brownian_loading(m.n());
    for (int k = K - 1; k >= 0; --k) {
        const Eigen::MatrixXd& A = m.A(k);
        const Eigen::MatrixXd& B = m.B(k);
        const Eigen::MatrixXd& C = m.C(k);
        const Eigen::VectorXd v_mid = 0.5 * (v_path[k] + v_path[k + 1]);
        auto f_a = [&](const Eigen::VectorXd& av, const Eigen::VectorXd& bv,
                       const Eigen::VectorXd& v) { return (A * av + B * v + C * bv).eval(); };
        auto f_b = [&](const Eigen::VectorXd& bv) { return (A * bv).eval(); };
        const double h = -dt;
        const Eigen::VectorXd kb1 = f_b(b[k + 1]);
        const Eigen::VectorXd ka1 = f_a(a[k + 1], b[k + 1], v_path[k + 1]);
        const Eigen::VectorXd kb2 = f_b(b[k + 1] + 0.5 * h * kb1);
        const Eigen::VectorXd ka2 = f_a(a[k + 1] + 0.5 * h * ka1, b[k + 1] + 0.5 * h * kb1, v_mid);
        const Eigen::VectorXd kb3 = f_b(b[k + 1] + 0.5 * h * kb2);
        const Eigen::VectorXd ka3 = f_a(a[k + 1] + 0.5 * h * ka2, b[k + 1] + 0.5 * h * kb2, v_mid);
        const Eigen::VectorXd kb4 = f_b(b[k + 1] + h * kb3);
        const Eigen::VectorXd ka4 = f_a(a[k + 1] + h * ka3, b[k + 1] + h * kb3, v_path[k]);
        b[k] = b[k + 1] + (h / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        a[k] = a[k + 1] + (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    }

    std::vector<double> state(nk), control(nk), zc(nk), ent(nk), coe(nk);
    const double sigma2 = m.sigma() * m.sigma();
    for (int k = 0; k < nk; ++k) {
        const double t = m.grid().knot(k);
        state[k] = a[k].dot(m.H(k) * a[k]) + t * b[k].dot(m.H(k) * b[k]);
        control[k] = v_path[k].dot(m.R(k) * v_path[k]) + sig[k].tr_r_sigma;
        zc[k] = b[k].dot(m.N(k) * b[k]);
        const double kl =
            0.5 * (sig[k].trace + v_path[k].squaredNorm() - m.p() - sig[k].log_det);
        ent[k] = sigma2 * kl;
        coe[k] = sig[k].tr_r_sigma;
    }

    CostReport rep;
    rep.state_cost = 0.5 * trapezoid(state, dt);
    rep.control_cost = 0.5 * trapezoid(control, dt);
    rep.z_cost = 0.5 * trapezoid(zc, dt);
    rep.entropy_cost = 0.5 * trapezoid(ent, dt);
    rep.endpoint_cost = 0.5 * a[0].dot(m.G() * a[0]);
    rep.total = rep.component_sum();
    rep.coe = 0.5 * trapezoid(coe, dt);
    return rep;
}

CostReport cost_monte_carlo(const ValidatedModel& m, const SimulatedEnsemble& ens,
                            const GaussianPolicyRule& rule, const MonteCarloOptions& opt) {
    const std::string origin = "evaluate.cost_monte_carlo";
    require_standard_gaussian(m, origin);
    const ValidatedModel& em = ens.model();
    if (!(em.grid() == m.grid()) || em.n() != m.n() || em.p() != m.p())
        throw NumericalError(ErrorCode::GridMismatch, origin,
                             "ensemble was generated from a different model/grid");
    if (rule.n_knots() != m.grid().n_knots())
        throw NumericalError(ErrorCode::GridMismatch, origin,
                             "policy rule defined on a different grid");

    const int K = m.grid().n_steps;
    const int nk = K + 1;
    const double dt = m.grid().dt();
    const double sigma2 = m.sigma() * m.sigma();
    const auto sig = cache_sigma(m, rule.Sigma, origin);
    std::vector<Eigen::LLT<Eigen::MatrixXd>> chol;
    if (opt.action_samples > 0) {
        chol.reserve(rule.Sigma.size());
        for (const auto& s : rule.Sigma) chol.emplace_back(s);
    }

    const int np = ens.n_paths();
    std::vector<double> tot(np), st(np), ct(np), zt(np), et(np), ep(np);

    for (int i = 0; i < np; ++i) {
        std::vector<double> state(nk), control(nk), zc(nk), ent(nk);
        for (int k = 0; k < nk; ++k) {
            const Eigen::VectorXd y = ens.Y(i, k);
            const Eigen::VectorXd z = ens.Z(i, k);
            const Eigen::VectorXd v = rule.mean(k, ens.P(i, k));
            state[k] = y.dot(m.H(k) * y);
            if (opt.action_samples > 0) {
                // validation path: Monte-Carlo over actions, zero-bias but noisier
                const Eigen::MatrixXd L = chol[std::size_t(k)].matrixL();
                double acc = 0.0;
                const std::uint64_t lane = (std::uint64_t(i) << 32) ^ std::uint64_t(k);
                for (int j = 0; j < opt.action_samples; ++j) {
                    Eigen::VectorXd u(m.p());
                    for (int c = 0; c < m.p(); ++c)
                        u[c] = rng::normal(opt.action_seed, rng::Stream::Actions, lane,
                                           std::uint64_t(j) * m.p() + std::uint64_t(c));
                    const Eigen::VectorXd act = v + L * u;
                    acc += act.dot(m.R(k) * act);
                }
                control[k] = acc / opt.action_samples;
            } else {
                control[k] = v.dot(m.R(k) * v) + sig[std::size_t(k)].tr_r_sigma;
            }
            zc[k] = z.dot(m.N(k) * z);
            const double kl = 0.5 * (sig[std::size_t(k)].trace + v.squaredNorm() - m.p() -
                                     sig[std::size_t(k)].log_det);
            ent[k] = sigma2 * kl;
        }
        st[std::size_t(i)] = 0.5 * trapezoid(state, dt);
        ct[std::size_t(i)] = 0.5 * trapezoid(control, dt);
        zt[std::size_t(i)] = 0.5 * trapezoid(zc, dt);
        et[std::size_t(i)] = 0.5 * trapezoid(ent, dt);
        const Eigen::VectorXd y0 = ens.Y(i, 0);
        ep[std::size_t(i)] = 0.5 * y0.dot(m.G() * y0);
        tot[std::size_t(i)] =
            st[std::size_t(i)] + ct[std::size_t(i)] + zt[std::size_t(i)] + et[std::size_t(i)] +
            ep[std::size_t(i)];
    }

    CostReport rep;
    rep.state_cost = pairwise_mean(st);
    rep.control_cost = pairwise_mean(ct);
    rep.z_cost = pairwise_mean(zt);
    rep.entropy_cost = pairwise_mean(et);
    rep.endpoint_cost = pairwise_mean(ep);
    rep.total = rep.component_sum();
    rep.n_paths = np;
    if (np > 1) {
        const double mean_tot = pairwise_mean(tot);
        std::vector<double> sq(tot.size());
        for (std::size_t i = 0; i < tot.size(); ++i) {
            const double d = tot[i] - mean_tot;
            sq[i] = d * d;
        }
        rep.std_error = std::sqrt(pairwise_sum(sq) / (double(np) - 1.0) / double(np));
    }
    rep.coe = cost_of_exploration(m, rule.Sigma);
    return rep;
}

double cost_of_exploration(const ValidatedModel& m,
                           const std::vector<Eigen::MatrixXd>& sigma_path) {
    const auto sig = cache_sigma(m, sigma_path, "evaluate.cost_of_exploration");
    std::vector<double> vals(sig.size());
    for (std::size_t k = 0; k < sig.size(); ++k) vals[k] = sig[k].tr_r_sigma;
    return 0.5 * trapezoid(vals, m.grid().dt());
}

std::vector<Eigen::VectorXd> mean_adjoint_path(const ValidatedModel& m, const RiccatiSolution& th,
                                               const PhiSolution& ph) {
    const std::string origin = "evaluate.mean_adjoint_path";
    if (th.n_knots() != m.grid().n_knots() || ph.n_knots() != m.grid().n_knots())
        throw NumericalError(ErrorCode::GridMismatch, origin,
                             "Theta and phi must be computed on the model grid");
    const int K = m.grid().n_steps;
    const double dt = m.grid().dt();

    std::vector<Eigen::VectorXd> e(std::size_t(K) + 1);
    const Eigen::MatrixXd resolvent0 = la::resolvent_inverse(th.at(0) * m.G(), origin);
    e[0] = -m.G() * resolvent0 * ph.alpha[0];

    auto rhs = [&](int k, double s, const Eigen::VectorXd& x) {
        const Eigen::MatrixXd theta = (1.0 - s) * th.at(k) + s * th.at(k + 1);
        const Eigen::VectorXd alpha = (1.0 - s) * ph.alpha[k] + s * ph.alpha[k + 1];
        return (-(m.A(k).transpose() + m.H(k) * theta) * x - m.H(k) * alpha).eval();
    };
    for (int k = 0; k < K; ++k) {
        const Eigen::VectorXd& x = e[std::size_t(k)];
        const Eigen::VectorXd k1 = rhs(k, 0.0, x);
        const Eigen::VectorXd k2 = rhs(k, 0.5, x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rhs(k, 0.5, x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rhs(k, 1.0, x + dt * k3);
        e[std::size_t(k) + 1] = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return e;
}

}  // namespace ebsc
