#include "qg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kernels.hpp"
#include "qg/error.hpp"

namespace qg {

Grid Grid::periodic(int nx, int ny, double lx, double ly, double x0, double y0) {
  Grid g{nx, ny, lx / nx, ly / ny, x0, y0, Topology::periodic};
  g.validate();
  return g;
}

Grid Grid::basin(int nx, int ny, double x0, double x1, double y0, double y1) {
  Grid g{nx, ny, (x1 - x0) / (nx - 1), (y1 - y0) / (ny - 1), x0, y0, Topology::basin};
  g.validate();
  return g;
}

void Grid::validate() const {
  if (nx < 8 || ny < 8)
    throw InvalidArgument("grid needs at least 8 nodes per axis, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
    throw InvalidArgument("grid spacing must be positive and finite");
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw InvalidArgument("grid origin must be finite");
}

bool Grid::same_as(const Grid& o) const {
  return nx == o.nx && ny == o.ny && dx == o.dx && dy == o.dy && x0 == o.x0 && y0 == o.y0 &&
         topology == o.topology;
}

ScalarField::ScalarField(const Grid& g, double fill) : grid_(g), v_(g.size(), fill) {}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
  if (v_.size() != g.size())
    throw InvalidArgument("field has " + std::to_string(v_.size()) + " values, grid needs " +
                          std::to_string(g.size()));
}

bool ScalarField::all_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : v_) s += v;
  return v_.empty() ? 0.0 : s / static_cast<double>(v_.size());
}

static void require_same(const ScalarField& a, const ScalarField& b) {
  if (!a.grid().same_as(b.grid())) throw InvalidArgument("fields live on different grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : v_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField lincomb(double a, const ScalarField& x, double b, const ScalarField& y) {
  require_same(x, y);
  ScalarField out(x.grid());
  kernels::active().axpby(x.size(), a, x.data(), b, y.data(), out.data());
  return out;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  require_same(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace qg
