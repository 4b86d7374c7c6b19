#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "qg/models.hpp"
#include "qg/sampling.hpp"

namespace qg {

/// Invariant solution psi1 = mu1 t + mu3 x + R(y), psi2 = mu2 t + mu4 x + S(y).
struct ModelIReduction {
  ModelIParams params{};
  double mu1 = 1.0, mu2 = 0.5, mu3 = 1.0, mu4 = 1.0;
};

/// psi_i = int a dt + sigma_i y + {M, N}(x).
struct ModelIIReduction {
  ModelIIParams params{};
  double sigma1 = 1.0, sigma2 = 1.0;
};

/// psi_i = int f dt + kappa_i x + {U, V, W}(y).
struct ModelIIIReduction {
  ModelIIIParams params = ModelIIIParams::table1();
  double kappa1 = 0.5, kappa2 = 1.0, kappa3 = 1.5;
};

using ReductionSpec = std::variant<ModelIReduction, ModelIIReduction, ModelIIIReduction>;

ModelKind kind_of(const ReductionSpec& r);
ModelSpec model_of(const ReductionSpec& r);

/// First-order form y' = A y + b(s), with b(s) = b_const + (b_sin + s b_ssin) sin(pi s / L).
struct ReducedSystem {
  ModelKind model = ModelKind::I;
  ReductionSpec spec;
  int n = 0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b_const, b_sin, b_ssin;
  double L = 1.0;  // only used by the sine terms
  std::vector<std::string> labels;  // state components, e.g. "R", "R'", "R''"
  std::string variable;             // "x" or "y"
  std::vector<std::string> unknowns;  // e.g. {"R", "S"}
  std::vector<int> offset;            // first state index of each unknown

  Eigen::VectorXd b(double s) const;
  Eigen::VectorXd rhs(double s, const Eigen::VectorXd& y) const { return A * y + b(s); }
};

/// Builds the reduced ODE system of the chosen invariant solution.
/// Throws InvalidArgument naming the constant when a leading coefficient vanishes.
ReducedSystem build_reduced(const ReductionSpec& r);

/// Default initial state: zero values, unit first derivatives.
Eigen::VectorXd default_initial_state(const ReducedSystem& sys);

/// Nodal samples of the full state vector on a uniform mesh.
struct Profile {
  double s0 = 0.0, h = 0.0;
  std::vector<Eigen::VectorXd> y;  // y[k] at s0 + k h
  ReducedSystem system;

  double s_max() const { return s0 + h * static_cast<double>(y.size() - 1); }
  /// Value (d = 0) or derivative d <= 2 of unknown u at s by quintic Hermite interpolation
  /// of the stored value, first and second derivative. Outside the mesh: InvalidArgument.
  double eval(int u, double s, int d = 0) const;
};

/// Classical fixed-step RK4 from s0 (where y = y0) to s1. When (s1 - s0) / h is not an integer
/// the step is reduced to the next uniform mesh that lands on s1.
/// Blow-up (|y| > 1e15) raises NumericalError carrying the location.
Profile integrate_reduced(const ReducedSystem& sys, const Eigen::VectorXd& y0, double s0, double s1, double h);

/// Generic RK4 for y' = f(s, y); shared by integrate_reduced.
std::vector<Eigen::VectorXd> rk4(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& y0, double s0, double h, int steps);

/// Eigenvalues of A sorted by real then imaginary part.
std::vector<std::complex<double>> characteristic_roots(const ReducedSystem& sys);

/// Threshold below which a computed root is reported as zero. Eigenvalues of the defective zero
/// block come out of the QR iteration as O(sqrt(eps) |A|) rather than exactly zero.
double zero_root_threshold(const ReducedSystem& sys);

enum class RootClass { zero, real, imaginary, complex };
RootClass classify_root(std::complex<double> r, double zero_tol);
const char* root_class_name(RootClass c);

/// Space-time sampler of the invariant streamfunctions. int_a is the antiderivative of the
/// arbitrary time function (default t). Sampling outside the profile range throws.
SamplerPtr assemble_invariant_solution(const Profile& profile,
                                       std::function<double(double)> int_a = [](double t) { return t; });

/// CSV with columns s and each unknown.
void write_profile_csv(std::ostream& os, const Profile& p);

}  // namespace qg
