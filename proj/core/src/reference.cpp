#include "korteweg/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace korteweg {

Field ReferenceSolution::V(double t, const ModelParams& p) const {
  return drift_velocity(r(t), p);
}

Field ReferenceSolution::dV_dt(double t, const ModelParams& p) const {
  const Field rf = r(t);
  const Field rdot = dr_dt(t);
  const Field mu_prime_f = map(rf, [&](double x) { return mu_prime(x, p); });
  return (deriv(mu_prime_f * rdot, 1) - V(t, p) * rdot) / rf;
}

Field ReferenceSolution::W(double t, const ModelParams& p) const {
  return U(t) + p.nu * V(t, p);
}

Field ReferenceSolution::dW_dt(double t, const ModelParams& p) const {
  return dU_dt(t) + p.nu * dV_dt(t, p);
}

Field ReferenceSolution::Vbar(double t, const ModelParams& p) const {
  return std::sqrt(p.epsilon * p.epsilon - p.nu * p.nu) * V(t, p);
}

Field ReferenceSolution::dVbar_dt(double t, const ModelParams& p) const {
  return std::sqrt(p.epsilon * p.epsilon - p.nu * p.nu) * dV_dt(t, p);
}

ManufacturedReference::ManufacturedReference(GridPtr g, const TravelingWaveSpec& spec)
    : grid_(std::move(g)), spec_(spec) {
  if (!(std::abs(spec.amplitude) < spec.base)) {
    throw std::invalid_argument("traveling wave: need |amplitude| < base");
  }
  if (spec.mode < 1) throw std::invalid_argument("traveling wave: mode must be >= 1");
  k_ = 2.0 * Grid::pi() * spec.mode / grid_->length();
}

Field ManufacturedReference::r(double t) const {
  return Field::sample(grid_, [&](double x) {
    return spec_.base + spec_.amplitude * std::cos(k_ * (x - spec_.speed * t));
  });
}

Field ManufacturedReference::U(double t) const {
  return Field::sample(grid_, [&](double x) {
    const double rho = spec_.base + spec_.amplitude * std::cos(k_ * (x - spec_.speed * t));
    return spec_.speed + spec_.flux / rho;
  });
}

Field ManufacturedReference::dr_dt(double t) const {
  return Field::sample(grid_, [&](double x) {
    return spec_.speed * spec_.amplitude * k_ * std::sin(k_ * (x - spec_.speed * t));
  });
}

Field ManufacturedReference::dU_dt(double t) const {
  return Field::sample(grid_, [&](double x) {
    const double rho = spec_.base + spec_.amplitude * std::cos(k_ * (x - spec_.speed * t));
    const double rdot = spec_.speed * spec_.amplitude * k_ * std::sin(k_ * (x - spec_.speed * t));
    return -spec_.flux * rdot / (rho * rho);
  });
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order) {
  // Fornberg's recursion for one-point finite-difference weights.
  const int n = static_cast<int>(nodes.size());
  if (n == 0 || order < 0 || order >= n) {
    throw std::invalid_argument("fd_weights: need more nodes than the derivative order");
  }
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i < n; ++i) {
    double c2 = 1.0;
    const double xi = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double xj = nodes[j] - x0;
      const double dx = nodes[i] - nodes[j];
      c2 *= dx;
      if (j == i - 1) {
        for (int m = std::min(i, order); m >= 1; --m) {
          c[i][m] = c1 * (m * c[i - 1][m - 1] - xj * c[i - 1][m]) / c2;
        }
        c[i][0] = -c1 * xj * c[i - 1][0] / c2;
      }
      for (int m = std::min(i, order); m >= 1; --m) {
        c[j][m] = (xi * c[j][m] - m * c[j][m - 1]) / dx;
      }
      c[j][0] = xi * c[j][0] / dx;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][order];
  return w;
}

TrajectoryReference::TrajectoryReference(std::shared_ptr<const Trajectory> traj, GridPtr target)
    : traj_(std::move(traj)) {
  if (!traj_ || traj_->size() == 0) {
    throw std::invalid_argument("trajectory reference: empty trajectory");
  }
  const GridPtr source = traj_->states.front().rho.grid;
  target_ = target ? std::move(target) : source;
  if (target_->n() > source->n()) {
    throw std::invalid_argument("trajectory reference: target grid is finer than the source");
  }
  if (target_->length() != source->length()) {
    throw std::invalid_argument("trajectory reference: domain lengths differ");
  }
}

int TrajectoryReference::index_of(double t) const {
  const auto& ts = traj_->times;
  const double span = std::max(1.0, std::abs(ts.back()));
  const auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-9 * span);
  if (it != ts.end() && std::abs(*it - t) <= 1e-9 * span) {
    return static_cast<int>(it - ts.begin());
  }
  throw std::invalid_argument("trajectory reference: t = " + fmt_g17(t) +
                              " is not a recorded time");
}

Field TrajectoryReference::r_at(int i) const {
  return restrict_to(traj_->states[i].rho, target_);
}

Field TrajectoryReference::u_at(int i) const {
  return restrict_to(transport_velocity(traj_->states[i], traj_->params), target_);
}

Field TrajectoryReference::r(double t) const { return r_at(index_of(t)); }

Field TrajectoryReference::U(double t) const { return u_at(index_of(t)); }

Field TrajectoryReference::time_derivative(int i,
                                           Field (TrajectoryReference::*value_at)(int) const) const {
  const int size = traj_->size();
  const int width = std::min(5, size);
  if (width < 2) {
    throw std::invalid_argument("trajectory reference: need at least two snapshots for d/dt");
  }
  int lo = std::clamp(i - width / 2, 0, size - width);
  std::vector<double> nodes(traj_->times.begin() + lo, traj_->times.begin() + lo + width);
  const std::vector<double> w = fd_weights(traj_->times[i], nodes, 1);
  Field acc = Field::zeros(target_);
  for (int j = 0; j < width; ++j) {
    acc += w[j] * (this->*value_at)(lo + j);
  }
  return acc;
}

Field TrajectoryReference::dr_dt(double t) const {
  return time_derivative(index_of(t), &TrajectoryReference::r_at);
}

Field TrajectoryReference::dU_dt(double t) const {
  return time_derivative(index_of(t), &TrajectoryReference::u_at);
}

}  // namespace korteweg
