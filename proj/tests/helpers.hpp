#pragma once

#include <Eigen/Dense>

#include "ebsc/model.hpp"

namespace ebsc::testing {

inline Eigen::MatrixXd m1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

struct ScalarSpec {
    double A = 0.0, B = 1.0, C = 0.0, H = 0.0, N = 0.0, R = 0.5, G = 0.0;
    double sigma = 1.0;
    double T = 1.0;
    int n_steps = 1000;
    double xi_c = 1.0;
    double xi_q = 0.0;  // xi = c + q W_T
    ReferenceMeasure reference = ReferenceMeasure::standard_gaussian();
};

inline LQModel scalar_model(const ScalarSpec& s) {
    LQModel m;
    m.n = 1;
    m.p = 1;
    m.grid = TimeGrid(s.T, s.n_steps);
    m.A = CoefficientPath::constant(m1(s.A), m.grid);
    m.B = CoefficientPath::constant(m1(s.B), m.grid);
    m.C = CoefficientPath::constant(m1(s.C), m.grid);
    m.H = CoefficientPath::constant(m1(s.H), m.grid);
    m.N = CoefficientPath::constant(m1(s.N), m.grid);
    m.R = CoefficientPath::constant(m1(s.R), m.grid);
    m.G = m1(s.G);
    m.sigma = s.sigma;
    m.terminal.c = Eigen::VectorXd::Constant(1, s.xi_c);
    if (s.xi_q != 0.0) m.terminal.q = Eigen::VectorXd::Constant(1, s.xi_q);
    m.reference = s.reference;
    return m;
}

// MODEL-1: the workhorse instance with a fully known closed form
// (Theta(t) = 1 - t, phi = 1, P = 0, v = 0, Sigma = 0.5).
inline LQModel model1(int n_steps = 1000) {
    ScalarSpec s;
    s.n_steps = n_steps;
    return scalar_model(s);
}

}  // namespace ebsc::testing
