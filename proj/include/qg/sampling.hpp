#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "qg/grid_ops.hpp"
#include "qg/models.hpp"
#include "qg/simulator.hpp"

namespace qg {

/// Space-time streamfunction source: psi_i(t, x, y) for every layer.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual int layers() const = 0;
  /// Writes layers() values into out.
  virtual void sample(double t, double x, double y, double* out) const = 0;
  /// False where the sampler has no data (outside a basin or the stored time span).
  virtual bool covers(double t, double x, double y) const {
    (void)t, (void)x, (void)y;
    return true;
  }
};

using SamplerPtr = std::shared_ptr<const Sampler>;

class FunctionSampler final : public Sampler {
 public:
  using Fn = std::function<void(double t, double x, double y, double* out)>;
  FunctionSampler(int layers, Fn fn) : layers_(layers), fn_(std::move(fn)) {}
  int layers() const override { return layers_; }
  void sample(double t, double x, double y, double* out) const override { fn_(t, x, y, out); }

 private:
  int layers_;
  Fn fn_;
};

enum class Interpolation {
  bicubic,   // 4x4 Lagrange on the stored nodes
  spectral,  // Fourier-refined copy of each snapshot (periodic only), then bicubic
};

/// Interpolates stored snapshots: bicubic in space (periodic wrap, or one-sided shifted stencils
/// near basin walls) and cubic Lagrange in time over uniformly spaced snapshots.
class TrajectorySampler final : public Sampler {
 public:
  TrajectorySampler(std::vector<LayeredState> snapshots, Interpolation mode = Interpolation::bicubic,
                    int refine = 8);
  int layers() const override;
  void sample(double t, double x, double y, double* out) const override;
  bool covers(double t, double x, double y) const override;
  const Grid& source_grid() const { return grid_; }
  double t_first() const { return t0_; }
  double t_last() const;

 private:
  double space(const ScalarField& f, double x, double y) const;

  Grid grid_;  // grid of the stored (possibly refined) fields
  double t0_ = 0.0, spacing_ = 0.0;
  std::vector<std::vector<ScalarField>> psi_;  // [snapshot][layer]
};

/// Streamfunction samples on a rectangular block of nodes at one time.
/// The block grid has basin topology so its outer rows act as a halo.
std::vector<ScalarField> sample_block(const Sampler& s, const Grid& block, double t);

/// Block covering the evaluation nodes of g plus a halo of h nodes on each side.
/// Periodic grids evaluate every node; basin grids keep a margin (at least 2) from the walls.
struct ResidualBlock {
  Grid block;
  int halo = 2;
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;  // evaluation nodes of g, half-open
};
ResidualBlock residual_block(const Grid& g, int halo = 2, int margin = 2);

/// omega_t + [omega, psi] - RHS on the block from psi at t - d, t, t + d, all by second-order
/// central differences. Valid at nodes at least two from the block edge.
std::vector<ScalarField> pde_operator(const ModelSpec& m, const std::vector<ScalarField>& psi_prev,
                                      const std::vector<ScalarField>& psi_now,
                                      const std::vector<ScalarField>& psi_next, double d,
                                      JacobianScheme scheme = JacobianScheme::central);

struct ResidualRecord {
  std::vector<double> max;  // per layer
  std::vector<double> rms;
  double overall_max() const;
};

/// dt_fd if positive, otherwise 1e-3 of the smallest gap between times (or of |t| + 1).
double default_fd_step(const std::vector<double>& times, double dt_fd);

/// Discrete PDE residual of the sampled solution at the evaluation nodes of g and the given times.
/// dt_fd is the central time step (see default_fd_step).
ResidualRecord pde_residual(const ModelSpec& m, const Sampler& s, const Grid& g,
                            const std::vector<double>& times, double dt_fd = 0.0,
                            JacobianScheme scheme = JacobianScheme::central, int margin = 2);

}  // namespace qg
