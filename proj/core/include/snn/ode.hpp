#pragma once

#include <functional>

#include <Eigen/Dense>

namespace snn {

// Uniform grid t_n = n dt, n = 0..steps.
struct TimeGrid {
    double dt = 1e-3;
    int steps = 0;

    static TimeGrid make(double T, double dt);
    double T() const { return dt * steps; }
    double t(int n) const { return dt * n; }
    bool operator==(const TimeGrid& o) const { return dt == o.dt && steps == o.steps; }
};

// Classical RK4 path that also keeps the four stage inputs of every step, so that
// downstream equations can be driven by exactly the values a joint integration would see.
// Stage s of step n is evaluated at t_n + {0, dt/2, dt/2, dt}[s].
class StagedPath {
public:
    StagedPath() = default;
    StagedPath(TimeGrid grid, int dim);

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }
    Eigen::Map<const Eigen::VectorXd> node(int n) const;
    Eigen::Map<const Eigen::VectorXd> stage(int n, int s) const;
    double node_value(int n, int i) const { return nodes_(i, n); }
    double stage_value(int n, int s, int i) const { return stages_(i, 4 * n + s); }
    // dim x (steps + 1)
    const Eigen::MatrixXd& nodes() const { return nodes_; }

    Eigen::Map<Eigen::VectorXd> node_mut(int n);
    Eigen::Map<Eigen::VectorXd> stage_mut(int n, int s);

private:
    TimeGrid grid_;
    int dim_ = 0;
    Eigen::MatrixXd nodes_;
    Eigen::MatrixXd stages_;
};

// rhs(n, s, y, dy): derivative at stage s of step n given the stage input y.
using StageRhs = std::function<void(int, int, const Eigen::VectorXd&, Eigen::VectorXd&)>;

StagedPath rk4_staged(const TimeGrid& grid, const Eigen::VectorXd& y0, const StageRhs& rhs);

double stage_offset(int s);

}  // namespace snn
