#pragma once

#include <cstdint>
#include <vector>

#include "ebsc/errors.hpp"

namespace ebsc {

// Uniform time grid on [0, T] with K steps and K+1 knots. Knot K lands on T
// exactly (computed as T*k/K, not by accumulating dt).
struct TimeGrid {
    double t_end = 1.0;
    int n_steps = 1000;

    TimeGrid() = default;
    TimeGrid(double T, int K) : t_end(T), n_steps(K) {
        if (!(T > 0.0) || K < 1)
            throw NumericalError(ErrorCode::InvalidArgument, "model.TimeGrid",
                                 "need t_end > 0 and n_steps >= 1");
    }

    double dt() const { return t_end / n_steps; }
    int n_knots() const { return n_steps + 1; }
    double knot(int k) const { return k == n_steps ? t_end : t_end * (double(k) / n_steps); }

    bool operator==(const TimeGrid& o) const {
        return t_end == o.t_end && n_steps == o.n_steps;
    }
};

// Uniform 1-D lattice over the action space, used by the grid Gibbs layer.
struct ControlGrid {
    double a_min = -10.0;
    double a_max = 10.0;
    int n_points = 2001;

    ControlGrid() = default;
    ControlGrid(double lo, double hi, int n) : a_min(lo), a_max(hi), n_points(n) {
        if (!(lo < hi) || n < 3)
            throw NumericalError(ErrorCode::InvalidArgument, "policy.ControlGrid",
                                 "need a_min < a_max and n_points >= 3");
    }

    double step() const { return (a_max - a_min) / (n_points - 1); }
    double point(int i) const {
        return i == n_points - 1 ? a_max : a_min + step() * i;
    }

    bool operator==(const ControlGrid& o) const {
        return a_min == o.a_min && a_max == o.a_max && n_points == o.n_points;
    }
};

}  // namespace ebsc
