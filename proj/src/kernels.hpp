#pragma once

#include <cstddef>

namespace qg::kernels {

// Row kernels over i in [i0, i1). up/mid/dn are rows j+1, j, j-1; indices i-1 and i+1 must be valid.
using LaplacianRow = void (*)(const double* up, const double* mid, const double* dn, double* out,
                              int i0, int i1, double ax, double ay);
using JacobianRow = void (*)(const double* aup, const double* amid, const double* adn,
                             const double* bup, const double* bmid, const double* bdn, double* out,
                             int i0, int i1, double sx, double sy);
using Axpby = void (*)(std::size_t n, double a, const double* x, double b, const double* y,
                       double* out);

struct KernelSet {
  LaplacianRow laplacian;
  JacobianRow central_jacobian;  // (dx a * sx)(dy b * sy) - (dy a * sy)(dx b * sx)
  JacobianRow arakawa;           // (J1 + J2 + J3) * sx * sy
  Axpby axpby;
};

const KernelSet& scalar_set();
const KernelSet* avx2_set();  // nullptr when not built for this target
const KernelSet& active();

}  // namespace qg::kernels
