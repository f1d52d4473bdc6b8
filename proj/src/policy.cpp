#include "ebsc/policy.hpp"

#include <cmath>

namespace ebsc {

GaussianPolicyRule optimal_policy_rule(const ValidatedModel& m) {
    const std::string origin = "policy.optimal_policy_rule";
    const auto kind = m.reference().kind;
    if (kind == ReferenceMeasure::Kind::GridPotential)
        throw NumericalError(ErrorCode::InvalidArgument, origin,
                             "closed-form rule needs a StandardGaussian or flat reference");

    const int K = m.grid().n_knots();
    const double half_sigma2 = 0.5 * m.sigma() * m.sigma();
    GaussianPolicyRule rule;
    rule.Sigma.resize(K);
    rule.gain.resize(K);
    rule.mean_shift.assign(K, Eigen::VectorXd::Zero(m.p()));
    for (int k = 0; k < K; ++k) {
        if (kind == ReferenceMeasure::Kind::StandardGaussian) {
            rule.Sigma[k] = half_sigma2 * m.R_eff_inv(k);
            rule.gain[k] = -m.R_eff_inv(k) * m.B(k).transpose();
        } else {  // flat prior: precision comes from R alone
            if (!la::is_spd(m.R(k)))
                throw NumericalError(ErrorCode::NonSPD, origin,
                                     "flat reference requires strictly positive definite R at t=" +
                                         std::to_string(m.grid().knot(k)));
            const Eigen::MatrixXd r_inv =
                m.R(k).llt().solve(Eigen::MatrixXd::Identity(m.p(), m.p()));
            rule.Sigma[k] = half_sigma2 * r_inv;
            rule.gain[k] = -r_inv * m.B(k).transpose();
        }
    }
    return rule;
}

namespace {

struct GibbsExponent {
    std::vector<double> shifted;  // exp(e_i - max_e)
    double log_norm = 0.0;        // ln of the trapezoid integral of exp(e)
};

GibbsExponent gibbs_exponent(const ControlGrid& grid, const std::vector<double>& h,
                             const std::vector<double>& u, double sigma,
                             const std::string& origin) {
    if (int(h.size()) != grid.n_points || int(u.size()) != grid.n_points)
        throw NumericalError(ErrorCode::GridMismatch, origin,
                             "h and U values must match the control grid");
    if (!(sigma > 0.0))
        throw NumericalError(ErrorCode::NonPositiveSigma, origin, "sigma must be > 0");

    const double scale = 2.0 / (sigma * sigma);
    std::vector<double> e(h.size());
    double max_e = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = -u[i] - scale * h[i];
        if (!std::isfinite(e[i]))
            throw NumericalError(ErrorCode::InvalidArgument, origin, "non-finite Gibbs exponent");
        max_e = std::max(max_e, e[i]);
    }

    GibbsExponent out;
    out.shifted.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) out.shifted[i] = std::exp(e[i] - max_e);

    std::vector<double> w = out.shifted;
    w.front() *= 0.5;
    w.back() *= 0.5;
    const double z = grid.step() * pairwise_sum(w);
    if (!(z > 0.0))
        throw NumericalError(ErrorCode::DegenerateMass, origin,
                             "Gibbs weights vanished after max-exponent shift");
    out.log_norm = max_e + std::log(z);

    // Truncation guard: the lattice must carry essentially all of the mass.
    const int np = grid.n_points;
    const double da = grid.step();
    const double edge_mass =
        da * (0.5 * out.shifted[0] + out.shifted[1] + out.shifted[std::size_t(np - 2)] +
              0.5 * out.shifted[std::size_t(np - 1)]) /
        z;
    if (edge_mass > 1e-8)
        throw NumericalError(ErrorCode::DegenerateMass, origin,
                             "density mass at the grid boundary exceeds 1e-8; widen the grid");
    return out;
}

}  // namespace

GridDensity gibbs_density(const ControlGrid& grid, const std::vector<double>& h_values,
                          const std::vector<double>& u_values, double sigma) {
    const auto ge = gibbs_exponent(grid, h_values, u_values, sigma, "policy.gibbs_density");
    return GridDensity::normalized(grid, ge.shifted);
}

LagrangeReport lagrange_beta(const ControlGrid& grid, const std::vector<double>& h_values,
                             const std::vector<double>& u_values, double sigma) {
    const std::string origin = "policy.lagrange_beta";
    const auto ge = gibbs_exponent(grid, h_values, u_values, sigma, origin);
    const GridDensity mu = GridDensity::normalized(grid, ge.shifted);

    LagrangeReport rep;
    rep.beta = 0.5 * sigma * sigma * (ge.log_norm - 1.0);
    for (int i = 0; i < grid.n_points; ++i) {
        const double m = mu.value(i);
        if (!(m > 0.0)) continue;
        const double r = h_values[std::size_t(i)] +
                         0.5 * sigma * sigma *
                             (u_values[std::size_t(i)] + std::log(m) + 1.0) +
                         rep.beta;
        rep.residual_sup = std::max(rep.residual_sup, std::fabs(r));
    }
    return rep;
}

FixedPointResult gibbs_fixed_point(const HamiltonianDerivativeSpec& spec, const ControlGrid& grid,
                                   const ReferenceMeasure& ref, double sigma, double damping,
                                   double tol, int max_iter) {
    const std::string origin = "policy.gibbs_fixed_point";
    if (!(damping > 0.0) || damping > 1.0)
        throw NumericalError(ErrorCode::InvalidArgument, origin, "damping must be in (0, 1]");
    if (!(tol > 0.0) || max_iter < 1)
        throw NumericalError(ErrorCode::InvalidArgument, origin,
                             "need tol > 0 and max_iter >= 1");

    const std::vector<double> u = ref.sample_on(grid, 1);
    const int np = grid.n_points;
    const double da = grid.step();

    // start from the prior e^{-U}
    std::vector<double> prior(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) prior[i] = std::exp(-u[i]);
    GridDensity mu = GridDensity::normalized(grid, prior);

    auto gibbs_map = [&](const GridDensity& d) {
        const double mean = d.mean();
        std::vector<double> h(std::size_t(np));
        for (int i = 0; i < np; ++i) h[std::size_t(i)] = spec.eval(grid.point(i), mean);
        return gibbs_density(grid, h, u, sigma);
    };

    double gap = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const GridDensity mapped = gibbs_map(mu);
        std::vector<double> mixed(std::size_t(np));
        std::vector<double> diff(std::size_t(np));
        for (int i = 0; i < np; ++i) {
            mixed[std::size_t(i)] =
                (1.0 - damping) * mu.value(i) + damping * mapped.value(i);
            diff[std::size_t(i)] = std::fabs(mixed[std::size_t(i)] - mu.value(i));
        }
        diff.front() *= 0.5;
        diff.back() *= 0.5;
        gap = da * pairwise_sum(diff);
        mu = GridDensity::normalized(grid, std::move(mixed));
        if (gap < tol) return {std::move(mu), it, gap};
        if (!std::isfinite(gap))
            throw NumericalError(ErrorCode::NaNEncountered, origin, "non-finite iterate gap");
    }
    throw NumericalError(ErrorCode::NoConvergence, origin,
                         "no convergence after " + std::to_string(max_iter) +
                             " iterations; last L1 gap " + std::to_string(gap));
}

}  // namespace ebsc
