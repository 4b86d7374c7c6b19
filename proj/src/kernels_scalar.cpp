#include "kernels.hpp"

namespace qg::kernels {
namespace {

void laplacian_row(const double* up, const double* mid, const double* dn, double* out, int i0,
                   int i1, double ax, double ay) {
  for (int i = i0; i < i1; ++i) {
    const double c2 = 2.0 * mid[i];
    out[i] = ((mid[i - 1] + mid[i + 1]) - c2) * ax + ((up[i] + dn[i]) - c2) * ay;
  }
}

void central_jacobian_row(const double* aup, const double* amid, const double* adn,
                          const double* bup, const double* bmid, const double* bdn, double* out,
                          int i0, int i1, double sx, double sy) {
  for (int i = i0; i < i1; ++i) {
    const double ax = (amid[i + 1] - amid[i - 1]) * sx;
    const double ay = (aup[i] - adn[i]) * sy;
    const double bx = (bmid[i + 1] - bmid[i - 1]) * sx;
    const double by = (bup[i] - bdn[i]) * sy;
    out[i] = ax * by - ay * bx;
  }
}

void arakawa_row(const double* aup, const double* amid, const double* adn, const double* bup,
                 const double* bmid, const double* bdn, double* out, int i0, int i1, double sx,
                 double sy) {
  const double s = sx * sy;
  for (int i = i0; i < i1; ++i) {
    const double j1 = (amid[i + 1] - amid[i - 1]) * (bup[i] - bdn[i]) -
                      (aup[i] - adn[i]) * (bmid[i + 1] - bmid[i - 1]);
    const double j2 = amid[i + 1] * (bup[i + 1] - bdn[i + 1]) -
                      amid[i - 1] * (bup[i - 1] - bdn[i - 1]) -
                      aup[i] * (bup[i + 1] - bup[i - 1]) + adn[i] * (bdn[i + 1] - bdn[i - 1]);
    const double j3 = bup[i] * (aup[i + 1] - aup[i - 1]) - bdn[i] * (adn[i + 1] - adn[i - 1]) -
                      bmid[i + 1] * (aup[i + 1] - adn[i + 1]) +
                      bmid[i - 1] * (aup[i - 1] - adn[i - 1]);
    out[i] = ((j1 + j2) + j3) * s;
  }
}

void axpby(std::size_t n, double a, const double* x, double b, const double* y, double* out) {
  for (std::size_t k = 0; k < n; ++k) out[k] = a * x[k] + b * y[k];
}

const KernelSet kScalar{laplacian_row, central_jacobian_row, arakawa_row, axpby};

}  // namespace

const KernelSet& scalar_set() { return kScalar; }

}  // namespace qg::kernels
