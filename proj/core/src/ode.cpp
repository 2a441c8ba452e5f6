#include "snn/ode.hpp"

#include <cmath>
#include <string>

#include "snn/errors.hpp"

namespace snn {

TimeGrid TimeGrid::make(double T, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
    if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("horizon must be non-negative");
    const double ratio = T / dt;
    const double r = std::round(ratio);
    if (std::abs(ratio - r) > 1e-9 * std::max(1.0, ratio))
        throw DomainError("horizon is not an integer number of time steps");
    return TimeGrid{dt, static_cast<int>(r)};
}

double stage_offset(int s) {
    static const double off[4] = {0.0, 0.5, 0.5, 1.0};
    return off[s];
}

StagedPath::StagedPath(TimeGrid grid, int dim)
    : grid_(grid), dim_(dim), nodes_(Eigen::MatrixXd::Zero(dim, grid.steps + 1)),
      stages_(Eigen::MatrixXd::Zero(dim, 4 * grid.steps)) {}

Eigen::Map<const Eigen::VectorXd> StagedPath::node(int n) const {
    return Eigen::Map<const Eigen::VectorXd>(nodes_.col(n).data(), dim_);
}

Eigen::Map<const Eigen::VectorXd> StagedPath::stage(int n, int s) const {
    return Eigen::Map<const Eigen::VectorXd>(stages_.col(4 * n + s).data(), dim_);
}

Eigen::Map<Eigen::VectorXd> StagedPath::node_mut(int n) {
    return Eigen::Map<Eigen::VectorXd>(nodes_.col(n).data(), dim_);
}

Eigen::Map<Eigen::VectorXd> StagedPath::stage_mut(int n, int s) {
    return Eigen::Map<Eigen::VectorXd>(stages_.col(4 * n + s).data(), dim_);
}

StagedPath rk4_staged(const TimeGrid& grid, const Eigen::VectorXd& y0, const StageRhs& rhs) {
    const int dim = static_cast<int>(y0.size());
    StagedPath path(grid, dim);
    path.node_mut(0) = y0;
    const double dt = grid.dt;
    Eigen::VectorXd y = y0, in(dim), k1(dim), k2(dim), k3(dim), k4(dim);
    for (int n = 0; n < grid.steps; ++n) {
        in = y;
        path.stage_mut(n, 0) = in;
        rhs(n, 0, in, k1);
        in = y + (0.5 * dt) * k1;
        path.stage_mut(n, 1) = in;
        rhs(n, 1, in, k2);
        in = y + (0.5 * dt) * k2;
        path.stage_mut(n, 2) = in;
        rhs(n, 2, in, k3);
        in = y + dt * k3;
        path.stage_mut(n, 3) = in;
        rhs(n, 3, in, k4);
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite())
            throw NumericError("ODE state became non-finite at t = " + std::to_string(grid.t(n + 1)));
        path.node_mut(n + 1) = y;
    }
    return path;
}

}  // namespace snn
