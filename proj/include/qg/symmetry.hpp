#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qg/models.hpp"
#include "qg/sampling.hpp"
#include "qg/symbolic.hpp"

namespace qg {

/// Closed-form finite transformation. base maps (t, x, y) at parameter eps; fiber maps psi given
/// the original point. Every builtin base map has base(-eps) as its inverse.
struct FlowMap {
  std::function<void(double eps, double& t, double& x, double& y)> base;
  std::function<void(double eps, double t, double x, double y, double* psi)> fiber;
};

/// Point-symmetry vector field xi^t d_t + xi^x d_x + xi^y d_y + eta^i d_psi_i.
struct GeneratorSpec {
  std::string name;
  std::vector<sym::Expr> xi;   // t, x, y
  std::vector<sym::Expr> eta;  // one per layer
  sym::FunctionTable functions;  // arbitrary time functions by name
  std::optional<FlowMap> flow;

  int layers() const { return static_cast<int>(eta.size()); }
  /// Component k: 0..2 the xi, 3.. the eta.
  const sym::Expr& component(int k) const { return k < 3 ? xi[k] : eta[k - 3]; }
  bool is_zero() const;
  std::string str() const;
};

/// Arbitrary time functions of the builtin tables: a, b, c (Model II) and f (Model III).
/// Missing entries default to u = 1.
GeneratorSpec make_generator(std::string name, int layers, std::vector<sym::Expr> xi, std::vector<sym::Expr> eta,
                             sym::FunctionTable fns = {});

/// X1..X7, Y1..Y8, Z1..Z5 with closed-form flows.
std::vector<GeneratorSpec> builtin_generators(ModelKind m, const sym::FunctionTable& fns = {});

/// Y8 with the fiber sign flipped (conjugated by t -> -t): the rotating-frame symmetry under the
/// bracket ordering used here. Not part of the builtin table.
GeneratorSpec rotating_frame_corrected(const sym::FunctionTable& fns = {});

/// The non-symmetry psi1 += eps x y t (negative control).
GeneratorSpec negative_control(ModelKind m);

/// Max deviation of (flow(eps) - flow(-eps)) / (2 eps) from the generator at the given points
/// (t, x, y, psi...).
double flow_consistency(const GeneratorSpec& g, const std::vector<std::array<double, sym::kVars>>& points,
                        double eps = 1e-6);

/// Sample of the image of a solution under a flow: psi~(T, X, Y) = fiber(eps, base(-eps, T, X, Y), psi).
class TransformedSampler final : public Sampler {
 public:
  TransformedSampler(SamplerPtr source, FlowMap flow, double eps);
  int layers() const override { return source_->layers(); }
  void sample(double t, double x, double y, double* out) const override;
  bool covers(double t, double x, double y) const override;

 private:
  SamplerPtr source_;
  FlowMap flow_;
  double eps_;
};

/// Applies a closed-form flow. Throws InvalidArgument when g has no flow.
SamplerPtr flow(const GeneratorSpec& g, double eps, SamplerPtr sol);

struct InvarianceSetup {
  Grid grid{};
  std::vector<double> times;
  double dt_fd = 0.0;  // zero: pde_residual default
  JacobianScheme scheme = JacobianScheme::central;
  double abs_tol = 1e-10;
};

struct InvarianceReport {
  std::string generator;
  double epsilon = 0.0;
  double residual_before = 0.0;
  double residual_after = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

/// Basin evaluation nodes that keep the image of the residual stencils inside the domain; throws
/// InvalidArgument (with the uncovered fraction) when the flow image leaves the sampled domain.
InvarianceReport verify_invariance(const ModelSpec& m, const GeneratorSpec& g, SamplerPtr sol, double eps,
                                   const InvarianceSetup& setup);

/// [g1, g2] = g1 g2 - g2 g1 by exact differentiation. The result carries no flow.
GeneratorSpec lie_bracket(const GeneratorSpec& g1, const GeneratorSpec& g2);

/// Exact coordinates of g in the span of basis, if any.
std::optional<std::vector<sym::Rational>> decompose(const GeneratorSpec& g, const std::vector<GeneratorSpec>& basis);

struct BracketEntry {
  std::optional<std::vector<sym::Rational>> coeffs;  // empty: irreducible
  std::string expression;                            // the bracket itself
};

struct BracketTable {
  std::vector<std::string> names;
  std::vector<std::vector<BracketEntry>> entry;  // entry[i][j] = [g_i, g_j]

  /// "[X1,X6] = -X2" lines for every non-vanishing entry with i < j.
  std::vector<std::string> nonzero_relations() const;
  bool antisymmetric() const;
  /// Jacobi identity via the structure constants (exact).
  bool jacobi() const;
};

BracketTable bracket_table(const std::vector<GeneratorSpec>& basis);

void write_invariance_csv(std::ostream& os, const std::vector<InvarianceReport>& rows);

}  // namespace qg
