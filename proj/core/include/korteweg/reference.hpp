#pragma once

#include <memory>
#include <vector>

#include "korteweg/integrate.hpp"

namespace korteweg {

// Smooth reference pair (r, U) with time derivatives.  The derived fields
// V = grad(mu(r))/r, W = U + nu V and Vbar = sqrt(eps^2 - nu^2) V are always
// computed from the defining formulas, never stored.
class ReferenceSolution {
 public:
  virtual ~ReferenceSolution() = default;

  virtual GridPtr grid() const = 0;
  virtual Field r(double t) const = 0;
  virtual Field U(double t) const = 0;
  virtual Field dr_dt(double t) const = 0;
  virtual Field dU_dt(double t) const = 0;

  Field V(double t, const ModelParams& p) const;
  // d/dt of V by the chain rule: (dx(mu'(r) dr/dt) - V dr/dt) / r.
  Field dV_dt(double t, const ModelParams& p) const;
  Field W(double t, const ModelParams& p) const;
  Field dW_dt(double t, const ModelParams& p) const;
  Field Vbar(double t, const ModelParams& p) const;
  Field dVbar_dt(double t, const ModelParams& p) const;
};

// Traveling-wave family r = base + amplitude cos(k (x - speed t)),
// U = speed + flux / r with k = 2 pi mode / length.  Solves the continuity
// equation exactly, so the drift-equation residual vanishes analytically.
struct TravelingWaveSpec {
  double base = 1.0;
  double amplitude = 0.0;
  int mode = 1;
  double speed = 0.0;
  double flux = 0.0;
};

class ManufacturedReference final : public ReferenceSolution {
 public:
  ManufacturedReference(GridPtr g, const TravelingWaveSpec& spec);

  GridPtr grid() const override { return grid_; }
  Field r(double t) const override;
  Field U(double t) const override;
  Field dr_dt(double t) const override;
  Field dU_dt(double t) const override;

 private:
  GridPtr grid_;
  TravelingWaveSpec spec_;
  double k_;
};

// Reference backed by a recorded trajectory.  Queries must land on recorded
// times; time derivatives use five-point finite-difference weights built for
// the actual (possibly nonuniform) recording times, fourth-order accurate.
// An optional coarser target grid restricts every answer spectrally.
class TrajectoryReference final : public ReferenceSolution {
 public:
  explicit TrajectoryReference(std::shared_ptr<const Trajectory> traj, GridPtr target = nullptr);

  GridPtr grid() const override { return target_; }
  Field r(double t) const override;
  Field U(double t) const override;
  Field dr_dt(double t) const override;
  Field dU_dt(double t) const override;

  const Trajectory& trajectory() const { return *traj_; }

 private:
  int index_of(double t) const;
  Field r_at(int i) const;
  Field u_at(int i) const;
  Field time_derivative(int i, Field (TrajectoryReference::*value_at)(int) const) const;

  std::shared_ptr<const Trajectory> traj_;
  GridPtr target_;
};

// Finite-difference weights on arbitrary nodes for the m-th derivative at x0.
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order);

}  // namespace korteweg
