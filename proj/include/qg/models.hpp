#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "qg/grid.hpp"

namespace qg {

enum class ModelKind { I, II, III };

std::string model_name(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

/// Two-layer f-plane model. eps_i = l^2 rho_i / ((rho2 - rho1) g H_i), alpha2 = rho1 / rho2.
struct ModelIParams {
  double rho1 = 1000.0;
  double rho2 = 1002.0;
  double H1 = 1000.0;
  double H2 = 3000.0;
  double l = 1.0e-4;
  double g = 9.81;

  void validate() const;
  double eps1() const { return l * l * rho1 / ((rho2 - rho1) * g * H1); }
  double eps2() const { return l * l * rho2 / ((rho2 - rho1) * g * H2); }
  double alpha2() const { return rho1 / rho2; }

  /// Nondimensional set used by the verification suites.
  static ModelIParams unit();
};

struct ModelIIParams {
  double lambda = 1.0e5;  // Rossby radius of deformation, m

  void validate() const;
  static ModelIIParams unit() { return ModelIIParams{1.0}; }
};

/// Three-layer wind-driven basin model on [-L, L]^2.
struct ModelIIIParams {
  double f0 = 1.0e-4;
  double beta0 = 1.6e-11;
  double rho0 = 1.0e3;
  double H1 = 600.0;
  double H2 = 1400.0;
  double H3 = 2000.0;
  double gp1 = 2.0e-2;
  double gp2 = 3.0e-2;
  double A_H = 300.0;
  double tau0 = 1.0e-1;
  double mu0 = 2.5e-6;
  double alpha = 0.0;
  double L = 0.0;  // derived from mu0 = pi tau0 / (rho0 f0 L)

  void validate() const;
  static ModelIIIParams table1();
  static double derived_L(double tau0, double rho0, double f0, double mu0);
};

using ModelSpec = std::variant<ModelIParams, ModelIIParams, ModelIIIParams>;

ModelKind kind_of(const ModelSpec& m);
int layer_count(const ModelSpec& m);
int layer_count(ModelKind k);
void validate(const ModelSpec& m);

/// Constant matrix M with omega = lap(psi) + M psi (+ beta0 y for Model III).
Eigen::MatrixXd coupling_matrix(const ModelSpec& m);

/// Planetary term beta0 (zero for Models I, II).
double planetary_gradient(const ModelSpec& m);

/// Default grid for a model: 64^2 periodic square of side 1e6 m (I, II) or the 64^2 basin [-L, L]^2 (III).
Grid default_grid(const ModelSpec& m, int n = 64);

struct LayeredState {
  double t = 0.0;
  std::vector<ScalarField> psi;
  std::vector<ScalarField> omega;
};

struct DiagnosticFields {
  std::vector<ScalarField> h;  // h1, h2
  std::vector<double> tau_x;   // along the y nodes
  std::vector<double> omega_e;
};

/// Forward PV map. On basin grids the wall Laplacian is the free-slip value 0.
std::vector<ScalarField> potential_vorticity(const ModelSpec& m, const std::vector<ScalarField>& psi);

/// Inverse PV map via vertical modes; betay_included says omega carries beta0 y (Model III).
std::vector<ScalarField> invert_pv(const ModelSpec& m, const std::vector<ScalarField>& omega,
                                   bool betay_included = true);

/// d omega / dt = -J_arakawa(omega, psi) [+ A_H lap^2 psi] [+ (f0/H1) Omega_e in layer 1].
std::vector<ScalarField> tendency(const ModelSpec& m, const LayeredState& s);

/// Interior-only free-slip biharmonic: lap of (lap psi with zero wall values).
ScalarField free_slip_biharmonic(const ScalarField& psi);

double wind_stress(const ModelIIIParams& p, double y);
double ekman_pumping(const ModelIIIParams& p, double y);
DiagnosticFields diagnostic_fields(const ModelIIIParams& p, const std::vector<ScalarField>& psi);

/// Builds a state from streamfunctions, filling omega.
LayeredState make_state(const ModelSpec& m, double t, std::vector<ScalarField> psi);

}  // namespace qg
