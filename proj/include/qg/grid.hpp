#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qg {

enum class Topology { periodic, basin };
enum class Axis { x, y };

/// Uniform node-centred mesh. Periodic grids cover nx*dx; basin grids span (nx-1)*dx wall to wall.
struct Grid {
  int nx = 0;
  int ny = 0;
  double dx = 1.0;
  double dy = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  Topology topology = Topology::periodic;

  static Grid periodic(int nx, int ny, double lx, double ly, double x0 = 0.0, double y0 = 0.0);
  static Grid basin(int nx, int ny, double x0, double x1, double y0, double y1);

  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  double length_x() const { return topology == Topology::periodic ? nx * dx : (nx - 1) * dx; }
  double length_y() const { return topology == Topology::periodic ? ny * dy : (ny - 1) * dy; }
  bool same_as(const Grid& o) const;
};

/// Real field on a Grid, stored row-major: value(i, j) at index j*nx + i.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0);
  ScalarField(const Grid& g, std::vector<double> values);

  template <class F>
  static ScalarField from_function(const Grid& g, F&& f) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
  }

  const Grid& grid() const { return grid_; }
  double& operator()(int i, int j) { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double* row(int j) { return v_.data() + static_cast<std::size_t>(j) * grid_.nx; }
  const double* row(int j) const { return v_.data() + static_cast<std::size_t>(j) * grid_.nx; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  std::size_t size() const { return v_.size(); }

  bool all_finite() const;
  double max_abs() const;
  double mean() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  Grid grid_{};
  std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// out = a*x + b*y, element-wise; uses the active SIMD kernel set.
ScalarField lincomb(double a, const ScalarField& x, double b, const ScalarField& y);

double max_abs_diff(const ScalarField& a, const ScalarField& b);

}  // namespace qg
