#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ebsc/grid.hpp"
#include "ebsc/numerics.hpp"

namespace ebsc {

// One matrix value per grid knot. Piecewise-linear specifications are
// expanded onto the knots up front; integrators use the left knot inside a
// step.
class CoefficientPath {
  public:
    CoefficientPath() = default;

    static CoefficientPath constant(const Eigen::MatrixXd& value, const TimeGrid& grid);
    // Linear interpolation of (times, values) sampled at the grid knots.
    // times must be increasing and cover [0, T].
    static CoefficientPath piecewise_linear(const std::vector<double>& times,
                                            const std::vector<Eigen::MatrixXd>& values,
                                            const TimeGrid& grid);
    static CoefficientPath from_knots(std::vector<Eigen::MatrixXd> values);

    const Eigen::MatrixXd& at(int knot) const { return values_.at(knot); }
    int rows() const { return values_.empty() ? 0 : int(values_[0].rows()); }
    int cols() const { return values_.empty() ? 0 : int(values_[0].cols()); }
    int n_knots() const { return int(values_.size()); }

    bool all_finite() const;

  private:
    std::vector<Eigen::MatrixXd> values_;
};

// xi = c, or xi = c + q * W_T.
struct TerminalCondition {
    Eigen::VectorXd c;
    std::optional<Eigen::VectorXd> q;

    bool affine() const { return q.has_value(); }
    Eigen::VectorXd brownian_loading(int n) const {
        return q ? *q : Eigen::VectorXd::Zero(n);
    }
};

// Prior e^{-U}. StandardGaussian carries the normalizing constant inside U;
// Flat is the improper U = 0 prior and is accepted only where the exploration
// cost identity needs it; GridPotential holds U sampled on a 1-D lattice.
struct ReferenceMeasure {
    enum class Kind { StandardGaussian, Flat, GridPotential };
    Kind kind = Kind::StandardGaussian;
    ControlGrid grid;              // GridPotential only
    std::vector<double> u_values;  // GridPotential only

    static ReferenceMeasure standard_gaussian() { return {}; }
    static ReferenceMeasure flat() { return {Kind::Flat, {}, {}}; }
    static ReferenceMeasure grid_potential(const ControlGrid& g, std::vector<double> u);

    // U(a) for the analytic kinds (p = control dimension).
    double potential(double a, int p = 1) const;
    std::vector<double> sample_on(const ControlGrid& g, int p = 1) const;
};

struct LQModel {
    int n = 1;  // state dimension
    int p = 1;  // control dimension
    CoefficientPath A, B, C, H, N, R;
    Eigen::MatrixXd G;
    double sigma = 1.0;  // exploration weight, > 0
    TerminalCondition terminal;
    ReferenceMeasure reference;
    TimeGrid grid;
};

// Model with symmetry/PSD certificates attached; symmetric weights are
// replaced by their symmetric parts when the asymmetry is within 1e-12.
class ValidatedModel {
  public:
    const LQModel& raw() const { return m_; }
    int n() const { return m_.n; }
    int p() const { return m_.p; }
    const TimeGrid& grid() const { return m_.grid; }
    double sigma() const { return m_.sigma; }
    const TerminalCondition& terminal() const { return m_.terminal; }
    const ReferenceMeasure& reference() const { return m_.reference; }

    const Eigen::MatrixXd& A(int k) const { return m_.A.at(k); }
    const Eigen::MatrixXd& B(int k) const { return m_.B.at(k); }
    const Eigen::MatrixXd& C(int k) const { return m_.C.at(k); }
    const Eigen::MatrixXd& H(int k) const { return m_.H.at(k); }
    const Eigen::MatrixXd& N(int k) const { return m_.N.at(k); }
    const Eigen::MatrixXd& R(int k) const { return m_.R.at(k); }
    const Eigen::MatrixXd& G() const { return m_.G; }

    // R_t + (sigma^2/2) I and its inverse, precomputed per knot.
    const Eigen::MatrixXd& R_eff(int k) const { return r_eff_.at(k); }
    const Eigen::MatrixXd& R_eff_inv(int k) const { return r_eff_inv_.at(k); }

    friend ValidatedModel validate_model(const LQModel& m);

  private:
    LQModel m_;
    std::vector<Eigen::MatrixXd> r_eff_, r_eff_inv_;
};

ValidatedModel validate_model(const LQModel& m);

// Relative entropy of N(v, Sigma) against the standard normal prior:
// (tr Sigma + |v|^2 - p - ln det Sigma) / 2. Throws NonSPD for bad Sigma.
double kl_gaussian(const Eigen::VectorXd& v, const Eigen::MatrixXd& sigma);

// Discretized 1-D probability density; nonnegative values, trapezoid mass 1.
class GridDensity {
  public:
    GridDensity() = default;
    // Normalizes; throws on negative values or zero mass.
    static GridDensity normalized(const ControlGrid& grid, std::vector<double> values);

    const ControlGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double value(int i) const { return values_[i]; }

    double integral() const;  // trapezoid mass (1 up to round-off)
    double mean() const;

  private:
    ControlGrid grid_;
    std::vector<double> values_;
};

// Trapezoid approximation of \int (ln mu + U) mu da. Points with mu = 0
// contribute 0. Throws UnnormalizedDensity if the trapezoid mass of mu
// deviates from 1 by more than 1e-8.
double entropy_grid(const GridDensity& mu, const ReferenceMeasure& ref);

}  // namespace ebsc
