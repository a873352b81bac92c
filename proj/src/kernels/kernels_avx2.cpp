// AVX2+FMA kernel variants. Compiled with per-function target attributes so
// the translation unit builds for generic x86-64; dispatch only installs these
// after a cpuid check. Non-x86 builds keep the scalar table.
//
// Exactness notes: kernels under the bit-identical contract use mul/add in the
// same order as the scalar reference (no FMA contraction); dot/gemv/gemm use
// FMA and multiple accumulators, so they agree to tolerance only.

#include "eegclf/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

#define EEGCLF_AVX2 __attribute__((target("avx2,fma")))

namespace eegclf::kernels {
namespace {

EEGCLF_AVX2 inline float hsum(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 sh = _mm_movehl_ps(lo, lo);
    lo = _mm_add_ps(lo, sh);
    sh = _mm_shuffle_ps(lo, lo, 1);
    lo = _mm_add_ss(lo, sh);
    return _mm_cvtss_f32(lo);
}

EEGCLF_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    lo = _mm_add_sd(lo, sh);
    return _mm_cvtsd_f64(lo);
}

// ---- dot ----

EEGCLF_AVX2 float dot_avx2(const float* a, const float* b, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps(), acc1 = _mm256_setzero_ps();
    __m256 acc2 = _mm256_setzero_ps(), acc3 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
        acc2 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 16), _mm256_loadu_ps(b + i + 16), acc2);
        acc3 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 24), _mm256_loadu_ps(b + i + 24), acc3);
    }
    for (; i + 8 <= n; i += 8)
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc0 = _mm256_add_ps(_mm256_add_ps(acc0, acc1), _mm256_add_ps(acc2, acc3));
    float s = hsum(acc0);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

EEGCLF_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc0 = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
    double s = hsum(acc0);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

template <class T>
T dot_k(const T* a, const T* b, std::size_t n) { return dot_avx2(a, b, n); }

// ---- elementwise, bit-identical contract ----

EEGCLF_AVX2 void axpy_avx2(std::size_t n, float alpha, const float* x, float* y) {
    __m256 va = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 prod = _mm256_mul_ps(va, _mm256_loadu_ps(x + i));
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

EEGCLF_AVX2 void axpy_avx2(std::size_t n, double alpha, const double* x, double* y) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

template <class T>
void axpy_k(std::size_t n, T alpha, const T* x, T* y) { axpy_avx2(n, alpha, x, y); }

EEGCLF_AVX2 void scale_div_avx2(std::size_t n, const float* x, float d, float* y) {
    __m256 vd = _mm256_set1_ps(d);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_div_ps(_mm256_loadu_ps(x + i), vd));
    for (; i < n; ++i) y[i] = x[i] / d;
}

EEGCLF_AVX2 void scale_div_avx2(std::size_t n, const double* x, double d, double* y) {
    __m256d vd = _mm256_set1_pd(d);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_div_pd(_mm256_loadu_pd(x + i), vd));
    for (; i < n; ++i) y[i] = x[i] / d;
}

template <class T>
void scale_div_k(std::size_t n, const T* x, T d, T* y) { scale_div_avx2(n, x, d, y); }

EEGCLF_AVX2 void mul_avx2(std::size_t n, const float* a, const float* b, float* y) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) y[i] = a[i] * b[i];
}

EEGCLF_AVX2 void mul_avx2(std::size_t n, const double* a, const double* b, double* y) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) y[i] = a[i] * b[i];
}

template <class T>
void mul_k(std::size_t n, const T* a, const T* b, T* y) { mul_avx2(n, a, b, y); }

EEGCLF_AVX2 void add_avx2(std::size_t n, const float* x, float* y) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) y[i] += x[i];
}

EEGCLF_AVX2 void add_avx2(std::size_t n, const double* x, double* y) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] += x[i];
}

template <class T>
void add_k(std::size_t n, const T* x, T* y) { add_avx2(n, x, y); }

EEGCLF_AVX2 float abs_max_avx2(const float* x, std::size_t n) {
    const __m256 mask = _mm256_castsi256_ps(_mm256_set1_epi32(0x7fffffff));
    __m256 vm = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        vm = _mm256_max_ps(vm, _mm256_and_ps(mask, _mm256_loadu_ps(x + i)));
    float m = 0.0f;
    alignas(32) float lanes[8];
    _mm256_store_ps(lanes, vm);
    for (float v : lanes) m = v > m ? v : m;
    for (; i < n; ++i) {
        float v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

EEGCLF_AVX2 double abs_max_avx2(const double* x, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vm = _mm256_max_pd(vm, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
    double m = 0.0;
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vm);
    for (double v : lanes) m = v > m ? v : m;
    for (; i < n; ++i) {
        double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

template <class T>
T abs_max_k(const T* x, std::size_t n) { return abs_max_avx2(x, n); }

EEGCLF_AVX2 void relu_fwd_avx2(std::size_t n, const float* x, float* y) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_max_ps(zero, _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

EEGCLF_AVX2 void relu_fwd_avx2(std::size_t n, const double* x, double* y) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_max_pd(zero, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

template <class T>
void relu_fwd_k(std::size_t n, const T* x, T* y) { relu_fwd_avx2(n, x, y); }

EEGCLF_AVX2 void relu_bwd_avx2(std::size_t n, const float* y, const float* dy, float* dx) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 keep = _mm256_cmp_ps(_mm256_loadu_ps(y + i), zero, _CMP_GT_OQ);
        _mm256_storeu_ps(dx + i, _mm256_and_ps(keep, _mm256_loadu_ps(dy + i)));
    }
    for (; i < n; ++i) dx[i] = y[i] > 0.0f ? dy[i] : 0.0f;
}

EEGCLF_AVX2 void relu_bwd_avx2(std::size_t n, const double* y, const double* dy, double* dx) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(y + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dx + i, _mm256_and_pd(keep, _mm256_loadu_pd(dy + i)));
    }
    for (; i < n; ++i) dx[i] = y[i] > 0.0 ? dy[i] : 0.0;
}

template <class T>
void relu_bwd_k(std::size_t n, const T* y, const T* dy, T* dx) { relu_bwd_avx2(n, y, dy, dx); }

// Positive lanes copy through vectorized; any negative lane falls back to the
// scalar exp path for that block, keeping results bit-identical to scalar.
EEGCLF_AVX2 void elu_fwd_avx2(std::size_t n, float alpha, const float* x, float* y) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_loadu_ps(x + i);
        __m256 pos = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
        if (_mm256_movemask_ps(pos) == 0xff) {
            _mm256_storeu_ps(y + i, v);
        } else {
            for (std::size_t j = i; j < i + 8; ++j)
                y[j] = x[j] > 0.0f ? x[j] : alpha * (std::exp(x[j]) - 1.0f);
        }
    }
    for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : alpha * (std::exp(x[i]) - 1.0f);
}

EEGCLF_AVX2 void elu_fwd_avx2(std::size_t n, double alpha, const double* x, double* y) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d pos = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
        if (_mm256_movemask_pd(pos) == 0xf) {
            _mm256_storeu_pd(y + i, v);
        } else {
            for (std::size_t j = i; j < i + 4; ++j)
                y[j] = x[j] > 0.0 ? x[j] : alpha * (std::exp(x[j]) - 1.0);
        }
    }
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : alpha * (std::exp(x[i]) - 1.0);
}

template <class T>
void elu_fwd_k(std::size_t n, T alpha, const T* x, T* y) { elu_fwd_avx2(n, alpha, x, y); }

EEGCLF_AVX2 void elu_bwd_avx2(std::size_t n, float alpha, const float* y, const float* dy, float* dx) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 va = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 vy = _mm256_loadu_ps(y + i);
        __m256 vdy = _mm256_loadu_ps(dy + i);
        __m256 neg = _mm256_mul_ps(vdy, _mm256_add_ps(vy, va));
        __m256 pos = _mm256_cmp_ps(vy, zero, _CMP_GT_OQ);
        _mm256_storeu_ps(dx + i, _mm256_blendv_ps(neg, vdy, pos));
    }
    for (; i < n; ++i) dx[i] = y[i] > 0.0f ? dy[i] : dy[i] * (y[i] + alpha);
}

EEGCLF_AVX2 void elu_bwd_avx2(std::size_t n, double alpha, const double* y, const double* dy, double* dx) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vdy = _mm256_loadu_pd(dy + i);
        __m256d neg = _mm256_mul_pd(vdy, _mm256_add_pd(vy, va));
        __m256d pos = _mm256_cmp_pd(vy, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dx + i, _mm256_blendv_pd(neg, vdy, pos));
    }
    for (; i < n; ++i) dx[i] = y[i] > 0.0 ? dy[i] : dy[i] * (y[i] + alpha);
}

template <class T>
void elu_bwd_k(std::size_t n, T alpha, const T* y, const T* dy, T* dx) { elu_bwd_avx2(n, alpha, y, dy, dx); }

// ---- gemv / ger / gemm ----

template <class T>
void gemv_k(std::size_t m, std::size_t n, const T* a, const T* x, T* y, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        T acc = dot_avx2(a + i * n, x, n);
        y[i] = accumulate ? y[i] + acc : acc;
    }
}

template <class T>
void gemv_t_k(std::size_t m, std::size_t n, const T* a, const T* x, T* y, bool accumulate) {
    if (!accumulate) std::memset(y, 0, n * sizeof(T));
    for (std::size_t i = 0; i < m; ++i) axpy_avx2(n, x[i], a + i * n, y);
}

template <class T>
void ger_k(std::size_t m, std::size_t n, T alpha, const T* x, const T* y, T* a) {
    for (std::size_t i = 0; i < m; ++i) {
        // axpy keeps the mul/add order of the scalar reference
        axpy_avx2(n, alpha * x[i], y, a + i * n);
    }
}

EEGCLF_AVX2 void gemm_avx2(std::size_t m, std::size_t n, std::size_t k,
                           const float* a, const float* b, float* c, bool accumulate) {
    if (!accumulate) std::memset(c, 0, m * n * sizeof(float));
    for (std::size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        float* crow = c + i * n;
        std::size_t j = 0;
        for (; j + 32 <= n; j += 32) {
            __m256 c0 = _mm256_loadu_ps(crow + j);
            __m256 c1 = _mm256_loadu_ps(crow + j + 8);
            __m256 c2 = _mm256_loadu_ps(crow + j + 16);
            __m256 c3 = _mm256_loadu_ps(crow + j + 24);
            for (std::size_t p = 0; p < k; ++p) {
                __m256 av = _mm256_set1_ps(arow[p]);
                const float* brow = b + p * n + j;
                c0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow), c0);
                c1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + 8), c1);
                c2 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + 16), c2);
                c3 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + 24), c3);
            }
            _mm256_storeu_ps(crow + j, c0);
            _mm256_storeu_ps(crow + j + 8, c1);
            _mm256_storeu_ps(crow + j + 16, c2);
            _mm256_storeu_ps(crow + j + 24, c3);
        }
        for (; j + 8 <= n; j += 8) {
            __m256 c0 = _mm256_loadu_ps(crow + j);
            for (std::size_t p = 0; p < k; ++p)
                c0 = _mm256_fmadd_ps(_mm256_set1_ps(arow[p]), _mm256_loadu_ps(b + p * n + j), c0);
            _mm256_storeu_ps(crow + j, c0);
        }
        for (; j < n; ++j) {
            float acc = crow[j];
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * b[p * n + j];
            crow[j] = acc;
        }
    }
}

EEGCLF_AVX2 void gemm_avx2(std::size_t m, std::size_t n, std::size_t k,
                           const double* a, const double* b, double* c, bool accumulate) {
    if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        std::size_t j = 0;
        for (; j + 16 <= n; j += 16) {
            __m256d c0 = _mm256_loadu_pd(crow + j);
            __m256d c1 = _mm256_loadu_pd(crow + j + 4);
            __m256d c2 = _mm256_loadu_pd(crow + j + 8);
            __m256d c3 = _mm256_loadu_pd(crow + j + 12);
            for (std::size_t p = 0; p < k; ++p) {
                __m256d av = _mm256_set1_pd(arow[p]);
                const double* brow = b + p * n + j;
                c0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow), c0);
                c1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 4), c1);
                c2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 8), c2);
                c3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + 12), c3);
            }
            _mm256_storeu_pd(crow + j, c0);
            _mm256_storeu_pd(crow + j + 4, c1);
            _mm256_storeu_pd(crow + j + 8, c2);
            _mm256_storeu_pd(crow + j + 12, c3);
        }
        for (; j + 4 <= n; j += 4) {
            __m256d c0 = _mm256_loadu_pd(crow + j);
            for (std::size_t p = 0; p < k; ++p)
                c0 = _mm256_fmadd_pd(_mm256_set1_pd(arow[p]), _mm256_loadu_pd(b + p * n + j), c0);
            _mm256_storeu_pd(crow + j, c0);
        }
        for (; j < n; ++j) {
            double acc = crow[j];
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * b[p * n + j];
            crow[j] = acc;
        }
    }
}

template <class T>
void gemm_k(std::size_t m, std::size_t n, std::size_t k,
            const T* a, const T* b, T* c, bool accumulate) {
    gemm_avx2(m, n, k, a, b, c, accumulate);
}

template <class T>
void gemm_nt_k(std::size_t m, std::size_t n, std::size_t k,
               const T* a, const T* b, T* c, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            T acc = dot_avx2(a + i * k, b + j * k, k);
            T& out = c[i * n + j];
            out = accumulate ? out + acc : acc;
        }
}

template <class T>
void gemm_tn_k(std::size_t m, std::size_t k, std::size_t n,
               const T* a, const T* b, T* c, bool accumulate) {
    if (!accumulate) std::memset(c, 0, k * n * sizeof(T));
    for (std::size_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        const T* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) axpy_avx2(n, arow[p], brow, c + p * n);
    }
}

} // namespace

namespace detail {

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

template <class T>
void fill_avx2(OpTable<T>& t) {
    t.dot = dot_k<T>;
    t.axpy = axpy_k<T>;
    t.scale_div = scale_div_k<T>;
    t.mul = mul_k<T>;
    t.add = add_k<T>;
    t.abs_max = abs_max_k<T>;
    t.relu_fwd = relu_fwd_k<T>;
    t.relu_bwd = relu_bwd_k<T>;
    t.elu_fwd = elu_fwd_k<T>;
    t.elu_bwd = elu_bwd_k<T>;
    t.gemv = gemv_k<T>;
    t.gemv_t = gemv_t_k<T>;
    t.ger = ger_k<T>;
    t.gemm = gemm_k<T>;
    t.gemm_nt = gemm_nt_k<T>;
    t.gemm_tn = gemm_tn_k<T>;
}

template void fill_avx2<float>(OpTable<float>&);
template void fill_avx2<double>(OpTable<double>&);

} // namespace detail
} // namespace eegclf::kernels

#else // non-x86: keep scalar table

namespace eegclf::kernels::detail {

bool cpu_has_avx2() { return false; }

template <class T>
void fill_avx2(OpTable<T>&) {}

template void fill_avx2<float>(OpTable<float>&);
template void fill_avx2<double>(OpTable<double>&);

} // namespace eegclf::kernels::detail

#endif
