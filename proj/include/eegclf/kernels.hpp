#pragma once

#include <cstddef>
#include <string_view>

// Flat-array arithmetic primitives behind a runtime-selected backend.
//
// Every kernel has a scalar reference implementation; on x86-64 an AVX2+FMA
// variant is selected at startup when the CPU supports it. Selection can be
// overridden with force() or the EEGCLF_KERNELS environment variable
// ("scalar", "avx2", "auto").
//
// Equivalence contract, checked by tests/test_kernels:
//   - order-preserving kernels (axpy, scale_div, mul, add, relu, elu, ger,
//     abs_max) produce bit-identical results on every backend;
//   - reduction kernels (dot, gemv, gemv_t, gemm) may reassociate sums and
//     agree with the scalar reference to relative tolerance only.
// Backend choice is fixed for the lifetime of the process, so results are
// reproducible on a given machine regardless of thread count.

namespace eegclf::kernels {

enum class Backend { scalar, avx2 };

Backend active();
bool supported(Backend b);
std::string_view name(Backend b);

// Override backend selection (tests, debugging). Throws std::invalid_argument
// if the backend is not supported on this CPU. Not safe to call concurrently
// with running kernels.
void force(Backend b);

template <class T>
struct OpTable {
    T (*dot)(const T* a, const T* b, std::size_t n);
    void (*axpy)(std::size_t n, T alpha, const T* x, T* y);      // y += alpha*x
    void (*scale_div)(std::size_t n, const T* x, T divisor, T* y); // y = x / divisor
    void (*mul)(std::size_t n, const T* a, const T* b, T* y);    // y = a .* b
    void (*add)(std::size_t n, const T* x, T* y);                // y += x
    T (*abs_max)(const T* x, std::size_t n);
    void (*relu_fwd)(std::size_t n, const T* x, T* y);
    void (*relu_bwd)(std::size_t n, const T* y, const T* dy, T* dx);
    void (*elu_fwd)(std::size_t n, T alpha, const T* x, T* y);
    // dx = dy * (y > 0 ? 1 : y + alpha); uses forward output y, no exp needed
    void (*elu_bwd)(std::size_t n, T alpha, const T* y, const T* dy, T* dx);
    // row-major A[m x n]: y = A*x (+y), y = A^T*x (+y), A += alpha * x y^T
    void (*gemv)(std::size_t m, std::size_t n, const T* a, const T* x, T* y, bool accumulate);
    void (*gemv_t)(std::size_t m, std::size_t n, const T* a, const T* x, T* y, bool accumulate);
    void (*ger)(std::size_t m, std::size_t n, T alpha, const T* x, const T* y, T* a);
    // C[m x n] = A[m x k] * B[k x n] (+C), all row-major
    void (*gemm)(std::size_t m, std::size_t n, std::size_t k,
                 const T* a, const T* b, T* c, bool accumulate);
    // C[m x n] = A[m x k] * B[n x k]^T (+C)
    void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k,
                    const T* a, const T* b, T* c, bool accumulate);
    // C[k x n] = A[m x k]^T * B[m x n] (+C)
    void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n,
                    const T* a, const T* b, T* c, bool accumulate);
};

template <class T>
const OpTable<T>& table();

extern template const OpTable<float>& table<float>();
extern template const OpTable<double>& table<double>();

template <class T>
inline T dot(const T* a, const T* b, std::size_t n) { return table<T>().dot(a, b, n); }
template <class T>
inline void axpy(std::size_t n, T alpha, const T* x, T* y) { table<T>().axpy(n, alpha, x, y); }
template <class T>
inline void scale_div(std::size_t n, const T* x, T divisor, T* y) { table<T>().scale_div(n, x, divisor, y); }
template <class T>
inline void mul(std::size_t n, const T* a, const T* b, T* y) { table<T>().mul(n, a, b, y); }
template <class T>
inline void add(std::size_t n, const T* x, T* y) { table<T>().add(n, x, y); }
template <class T>
inline T abs_max(const T* x, std::size_t n) { return table<T>().abs_max(x, n); }
template <class T>
inline void relu_fwd(std::size_t n, const T* x, T* y) { table<T>().relu_fwd(n, x, y); }
template <class T>
inline void relu_bwd(std::size_t n, const T* y, const T* dy, T* dx) { table<T>().relu_bwd(n, y, dy, dx); }
template <class T>
inline void elu_fwd(std::size_t n, T alpha, const T* x, T* y) { table<T>().elu_fwd(n, alpha, x, y); }
template <class T>
inline void elu_bwd(std::size_t n, T alpha, const T* y, const T* dy, T* dx) { table<T>().elu_bwd(n, alpha, y, dy, dx); }
template <class T>
inline void gemv(std::size_t m, std::size_t n, const T* a, const T* x, T* y, bool accumulate = false) {
    table<T>().gemv(m, n, a, x, y, accumulate);
}
template <class T>
inline void gemv_t(std::size_t m, std::size_t n, const T* a, const T* x, T* y, bool accumulate = false) {
    table<T>().gemv_t(m, n, a, x, y, accumulate);
}
template <class T>
inline void ger(std::size_t m, std::size_t n, T alpha, const T* x, const T* y, T* a) {
    table<T>().ger(m, n, alpha, x, y, a);
}
template <class T>
inline void gemm(std::size_t m, std::size_t n, std::size_t k,
                 const T* a, const T* b, T* c, bool accumulate = false) {
    table<T>().gemm(m, n, k, a, b, c, accumulate);
}
template <class T>
inline void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
                    const T* a, const T* b, T* c, bool accumulate = false) {
    table<T>().gemm_nt(m, n, k, a, b, c, accumulate);
}
template <class T>
inline void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
                    const T* a, const T* b, T* c, bool accumulate = false) {
    table<T>().gemm_tn(m, k, n, a, b, c, accumulate);
}

namespace detail {
template <class T> void fill_scalar(OpTable<T>& t);
template <class T> void fill_avx2(OpTable<T>& t);
bool cpu_has_avx2();
}

} // namespace eegclf::kernels
