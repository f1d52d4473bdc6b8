#include "ebsc/model.hpp"

#include <cmath>

namespace ebsc {

CoefficientPath CoefficientPath::constant(const Eigen::MatrixXd& value, const TimeGrid& grid) {
    CoefficientPath p;
    p.values_.assign(grid.n_knots(), value);
    return p;
}

CoefficientPath CoefficientPath::piecewise_linear(const std::vector<double>& times,
                                                  const std::vector<Eigen::MatrixXd>& values,
                                                  const TimeGrid& grid) {
    if (times.size() != values.size() || times.size() < 2)
        throw NumericalError(ErrorCode::InvalidArgument, "model.CoefficientPath",
                             "piecewise-linear spec needs matching times/values, length >= 2");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1]))
            throw NumericalError(ErrorCode::InvalidArgument, "model.CoefficientPath",
                                 "breakpoint times must be strictly increasing");
        if (values[i].rows() != values[0].rows() || values[i].cols() != values[0].cols())
            throw NumericalError(ErrorCode::ShapeMismatch, "model.CoefficientPath",
                                 "matrix shape must be constant over time");
    }
    if (times.front() > 0.0 || times.back() < grid.t_end)
        throw NumericalError(ErrorCode::InvalidArgument, "model.CoefficientPath",
                             "breakpoints must cover [0, t_end]");
    CoefficientPath p;
    p.values_.reserve(grid.n_knots());
    std::size_t seg = 0;
    for (int k = 0; k < grid.n_knots(); ++k) {
        const double t = grid.knot(k);
        while (seg + 2 < times.size() && t > times[seg + 1]) ++seg;
        const double w = (t - times[seg]) / (times[seg + 1] - times[seg]);
        p.values_.push_back((1.0 - w) * values[seg] + w * values[seg + 1]);
    }
    return p;
}

CoefficientPath CoefficientPath::from_knots(std::vector<Eigen::MatrixXd> values) {
    CoefficientPath p;
    p.values_ = std::move(values);
    return p;
}

bool CoefficientPath::all_finite() const {
    for (const auto& v : values_)
        if (!v.allFinite()) return false;
    return true;
}

ReferenceMeasure ReferenceMeasure::grid_potential(const ControlGrid& g, std::vector<double> u) {
    if (int(u.size()) != g.n_points)
        throw NumericalError(ErrorCode::ShapeMismatch, "model.ReferenceMeasure",
                             "potential values must match the control grid");
    for (double x : u)
        if (!std::isfinite(x))
            throw NumericalError(ErrorCode::InvalidArgument, "model.ReferenceMeasure",
                                 "potential values must be finite");
    ReferenceMeasure r;
    r.kind = Kind::GridPotential;
    r.grid = g;
    r.u_values = std::move(u);
    return r;
}

double ReferenceMeasure::potential(double a, int p) const {
    switch (kind) {
        case Kind::StandardGaussian:
            return 0.5 * a * a + 0.5 * p * std::log(2.0 * M_PI);
        case Kind::Flat:
            return 0.0;
        case Kind::GridPotential: {
            // nearest-knot lookup; callers evaluating off the stored grid are
            // expected to resample via sample_on.
            const double w = (a - grid.a_min) / grid.step();
            const int i = std::clamp(int(std::lround(w)), 0, grid.n_points - 1);
            return u_values[std::size_t(i)];
        }
    }
    return 0.0;
}

std::vector<double> ReferenceMeasure::sample_on(const ControlGrid& g, int p) const {
    if (kind == Kind::GridPotential && !(g == grid))
        throw NumericalError(ErrorCode::GridMismatch, "model.ReferenceMeasure",
                             "grid potential sampled on a different control grid");
    std::vector<double> u(g.n_points);
    for (int i = 0; i < g.n_points; ++i) u[std::size_t(i)] = potential(g.point(i), p);
    return u;
}

namespace {

constexpr double kSymmetryTol = 1e-12;

Eigen::MatrixXd require_symmetric_psd(const Eigen::MatrixXd& m, const std::string& name,
                                      const TimeGrid& grid, int knot) {
    const std::string origin = "model.validate_model";
    if (la::asymmetry(m) > kSymmetryTol)
        throw NumericalError(ErrorCode::ShapeMismatch, origin,
                             name + " asymmetric beyond 1e-12 at t=" +
                                 std::to_string(grid.knot(knot)));
    const Eigen::MatrixXd s = la::symmetrize(m);
    if (!la::is_psd(s))
        throw NumericalError(ErrorCode::NonPSD, origin,
                             name + " not positive semi-definite at t=" +
                                 std::to_string(grid.knot(knot)));
    return s;
}

void require_shape(const CoefficientPath& p, int rows, int cols, const std::string& name,
                   const TimeGrid& grid) {
    if (p.n_knots() != grid.n_knots() || p.rows() != rows || p.cols() != cols)
        throw NumericalError(ErrorCode::ShapeMismatch, "model.validate_model",
                             name + " must be " + std::to_string(rows) + "x" +
                                 std::to_string(cols) + " on every grid knot");
    if (!p.all_finite())
        throw NumericalError(ErrorCode::InvalidArgument, "model.validate_model",
                             name + " has non-finite entries");
}

}  // namespace

ValidatedModel validate_model(const LQModel& m) {
    const std::string origin = "model.validate_model";
    if (m.n < 1 || m.p < 1)
        throw NumericalError(ErrorCode::ShapeMismatch, origin, "need n >= 1 and p >= 1");
    if (!(m.sigma > 0.0))
        throw NumericalError(ErrorCode::NonPositiveSigma, origin, "sigma must be > 0");

    require_shape(m.A, m.n, m.n, "A", m.grid);
    require_shape(m.B, m.n, m.p, "B", m.grid);
    require_shape(m.C, m.n, m.n, "C", m.grid);
    require_shape(m.H, m.n, m.n, "H", m.grid);
    require_shape(m.N, m.n, m.n, "N", m.grid);
    require_shape(m.R, m.p, m.p, "R", m.grid);
    if (m.G.rows() != m.n || m.G.cols() != m.n)
        throw NumericalError(ErrorCode::ShapeMismatch, origin, "G must be n x n");
    if (int(m.terminal.c.size()) != m.n)
        throw NumericalError(ErrorCode::ShapeMismatch, origin, "terminal c must have length n");
    if (m.terminal.q && int(m.terminal.q->size()) != m.n)
        throw NumericalError(ErrorCode::ShapeMismatch, origin, "terminal q must have length n");
    if (!m.terminal.c.allFinite() || (m.terminal.q && !m.terminal.q->allFinite()))
        throw NumericalError(ErrorCode::InvalidArgument, origin, "terminal condition not finite");

    ValidatedModel v;
    v.m_ = m;
    v.m_.G = require_symmetric_psd(m.G, "G", m.grid, 0);

    const int K = m.grid.n_knots();
    std::vector<Eigen::MatrixXd> Hs(K), Ns(K), Rs(K);
    v.r_eff_.resize(K);
    v.r_eff_inv_.resize(K);
    const Eigen::MatrixXd half_sigma2 =
        0.5 * m.sigma * m.sigma * Eigen::MatrixXd::Identity(m.p, m.p);
    for (int k = 0; k < K; ++k) {
        Hs[k] = require_symmetric_psd(m.H.at(k), "H", m.grid, k);
        Ns[k] = require_symmetric_psd(m.N.at(k), "N", m.grid, k);
        Rs[k] = require_symmetric_psd(m.R.at(k), "R", m.grid, k);
        v.r_eff_[k] = Rs[k] + half_sigma2;
        if (!la::is_spd(v.r_eff_[k]))
            throw NumericalError(ErrorCode::NonPSD, origin,
                                 "R + sigma^2/2 I not positive definite at t=" +
                                     std::to_string(m.grid.knot(k)));
        v.r_eff_inv_[k] = v.r_eff_[k].llt().solve(Eigen::MatrixXd::Identity(m.p, m.p));
    }
    // store the symmetrized weights back
    v.m_.H = CoefficientPath::from_knots(std::move(Hs));
    v.m_.N = CoefficientPath::from_knots(std::move(Ns));
    v.m_.R = CoefficientPath::from_knots(std::move(Rs));
    return v;
}

double kl_gaussian(const Eigen::VectorXd& v, const Eigen::MatrixXd& sigma) {
    const std::string origin = "model.kl_gaussian";
    const int p = int(v.size());
    if (sigma.rows() != p || sigma.cols() != p)
        throw NumericalError(ErrorCode::ShapeMismatch, origin, "Sigma must be p x p");
    if (la::asymmetry(sigma) > 1e-10)
        throw NumericalError(ErrorCode::NonSPD, origin, "Sigma must be symmetric");
    const Eigen::MatrixXd s = la::symmetrize(sigma);
    if (!la::is_spd(s))
        throw NumericalError(ErrorCode::NonSPD, origin, "Sigma must be positive definite");
    const double log_det = la::log_det_spd(s, origin);
    return 0.5 * (s.trace() + v.squaredNorm() - p - log_det);
}

GridDensity GridDensity::normalized(const ControlGrid& grid, std::vector<double> values) {
    const std::string origin = "model.GridDensity";
    if (int(values.size()) != grid.n_points)
        throw NumericalError(ErrorCode::ShapeMismatch, origin, "values must match grid size");
    double mass = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = values[std::size_t(i)];
        if (!std::isfinite(x) || x < 0.0)
            throw NumericalError(ErrorCode::InvalidArgument, origin,
                                 "density values must be finite and nonnegative");
        mass += (i == 0 || i == grid.n_points - 1) ? 0.5 * x : x;
    }
    mass *= grid.step();
    if (!(mass > 0.0))
        throw NumericalError(ErrorCode::DegenerateMass, origin, "density has zero mass");
    for (double& x : values) x /= mass;
    GridDensity d;
    d.grid_ = grid;
    d.values_ = std::move(values);
    return d;
}

double GridDensity::integral() const {
    std::vector<double> w = values_;
    w.front() *= 0.5;
    w.back() *= 0.5;
    return grid_.step() * pairwise_sum(w);
}

double GridDensity::mean() const {
    std::vector<double> w(values_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = grid_.point(int(i)) * values_[i];
    w.front() *= 0.5;
    w.back() *= 0.5;
    return grid_.step() * pairwise_sum(w);
}

double entropy_grid(const GridDensity& mu, const ReferenceMeasure& ref) {
    const std::string origin = "model.entropy_grid";
    if (std::fabs(mu.integral() - 1.0) > 1e-8)
        throw NumericalError(ErrorCode::UnnormalizedDensity, origin,
                             "density mass deviates from 1 beyond 1e-8");
    const std::vector<double> u = ref.sample_on(mu.grid(), 1);
    std::vector<double> terms(mu.values().size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double m = mu.value(int(i));
        terms[i] = m > 0.0 ? m * (std::log(m) + u[i]) : 0.0;
    }
    return trapezoid(terms, mu.grid().step());
}

}  // namespace ebsc
