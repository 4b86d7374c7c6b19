#include "kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace qg::kernels {
namespace {

// Same operation order as the scalar set, so results agree bit for bit (no FMA contraction).

void laplacian_row(const double* up, const double* mid, const double* dn, double* out, int i0,
                   int i1, double ax, double ay) {
  const __m256d vax = _mm256_set1_pd(ax);
  const __m256d vay = _mm256_set1_pd(ay);
  const __m256d two = _mm256_set1_pd(2.0);
  int i = i0;
  for (; i + 4 <= i1; i += 4) {
    const __m256d c2 = _mm256_mul_pd(two, _mm256_loadu_pd(mid + i));
    const __m256d hx = _mm256_sub_pd(
        _mm256_add_pd(_mm256_loadu_pd(mid + i - 1), _mm256_loadu_pd(mid + i + 1)), c2);
    const __m256d hy =
        _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(up + i), _mm256_loadu_pd(dn + i)), c2);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(hx, vax), _mm256_mul_pd(hy, vay)));
  }
  for (; i < i1; ++i) {
    const double c2 = 2.0 * mid[i];
    out[i] = ((mid[i - 1] + mid[i + 1]) - c2) * ax + ((up[i] + dn[i]) - c2) * ay;
  }
}

void central_jacobian_row(const double* aup, const double* amid, const double* adn,
                          const double* bup, const double* bmid, const double* bdn, double* out,
                          int i0, int i1, double sx, double sy) {
  const __m256d vsx = _mm256_set1_pd(sx);
  const __m256d vsy = _mm256_set1_pd(sy);
  int i = i0;
  for (; i + 4 <= i1; i += 4) {
    const __m256d ax =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(amid + i + 1), _mm256_loadu_pd(amid + i - 1)), vsx);
    const __m256d ay =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(aup + i), _mm256_loadu_pd(adn + i)), vsy);
    const __m256d bx =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(bmid + i + 1), _mm256_loadu_pd(bmid + i - 1)), vsx);
    const __m256d by =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(bup + i), _mm256_loadu_pd(bdn + i)), vsy);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_mul_pd(ax, by), _mm256_mul_pd(ay, bx)));
  }
  for (; i < i1; ++i) {
    const double ax = (amid[i + 1] - amid[i - 1]) * sx;
    const double ay = (aup[i] - adn[i]) * sy;
    const double bx = (bmid[i + 1] - bmid[i - 1]) * sx;
    const double by = (bup[i] - bdn[i]) * sy;
    out[i] = ax * by - ay * bx;
  }
}

inline __m256d ld(const double* p) { return _mm256_loadu_pd(p); }
inline __m256d sub(__m256d a, __m256d b) { return _mm256_sub_pd(a, b); }
inline __m256d add(__m256d a, __m256d b) { return _mm256_add_pd(a, b); }
inline __m256d mul(__m256d a, __m256d b) { return _mm256_mul_pd(a, b); }

void arakawa_row(const double* aup, const double* amid, const double* adn, const double* bup,
                 const double* bmid, const double* bdn, double* out, int i0, int i1, double sx,
                 double sy) {
  const double s = sx * sy;
  const __m256d vs = _mm256_set1_pd(s);
  int i = i0;
  for (; i + 4 <= i1; i += 4) {
    const __m256d am = ld(amid + i - 1), ap = ld(amid + i + 1);
    const __m256d bm = ld(bmid + i - 1), bp = ld(bmid + i + 1);
    const __m256d au = ld(aup + i), ad = ld(adn + i), bu = ld(bup + i), bd = ld(bdn + i);
    const __m256d aum = ld(aup + i - 1), aup1 = ld(aup + i + 1);
    const __m256d adm = ld(adn + i - 1), adp = ld(adn + i + 1);
    const __m256d bum = ld(bup + i - 1), bup1 = ld(bup + i + 1);
    const __m256d bdm = ld(bdn + i - 1), bdp = ld(bdn + i + 1);
    const __m256d j1 = sub(mul(sub(ap, am), sub(bu, bd)), mul(sub(au, ad), sub(bp, bm)));
    const __m256d j2 = add(sub(sub(mul(ap, sub(bup1, bdp)), mul(am, sub(bum, bdm))),
                               mul(au, sub(bup1, bum))),
                           mul(ad, sub(bdp, bdm)));
    const __m256d j3 = add(sub(sub(mul(bu, sub(aup1, aum)), mul(bd, sub(adp, adm))),
                               mul(bp, sub(aup1, adp))),
                           mul(bm, sub(aum, adm)));
    _mm256_storeu_pd(out + i, mul(add(add(j1, j2), j3), vs));
  }
  for (; i < i1; ++i) {
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
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    _mm256_storeu_pd(out + k, add(mul(va, ld(x + k)), mul(vb, ld(y + k))));
  for (; k < n; ++k) out[k] = a * x[k] + b * y[k];
}

const KernelSet kAvx2{laplacian_row, central_jacobian_row, arakawa_row, axpby};

}  // namespace

const KernelSet* avx2_set() { return &kAvx2; }

}  // namespace qg::kernels

#else

namespace qg::kernels {
const KernelSet* avx2_set() { return nullptr; }
}  // namespace qg::kernels

#endif
