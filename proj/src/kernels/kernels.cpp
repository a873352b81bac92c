#include "eegclf/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>

namespace eegclf::kernels {

namespace {

template <class T>
T dot_scalar(const T* a, const T* b, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <class T>
void axpy_scalar(std::size_t n, T alpha, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <class T>
void scale_div_scalar(std::size_t n, const T* x, T divisor, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] / divisor;
}

template <class T>
void mul_scalar(std::size_t n, const T* a, const T* b, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

template <class T>
void add_scalar(std::size_t n, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

template <class T>
T abs_max_scalar(const T* x, std::size_t n) {
    T m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        T v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

template <class T>
void relu_fwd_scalar(std::size_t n, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <class T>
void relu_bwd_scalar(std::size_t n, const T* y, const T* dy, T* dx) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = y[i] > T(0) ? dy[i] : T(0);
}

template <class T>
void elu_fwd_scalar(std::size_t n, T alpha, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] > T(0) ? x[i] : alpha * (std::exp(x[i]) - T(1));
}

template <class T>
void elu_bwd_scalar(std::size_t n, T alpha, const T* y, const T* dy, T* dx) {
    for (std::size_t i = 0; i < n; ++i)
        dx[i] = y[i] > T(0) ? dy[i] : dy[i] * (y[i] + alpha);
}

template <class T>
void gemv_scalar(std::size_t m, std::size_t n, const T* a, const T* x, T* y, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        T acc = dot_scalar(a + i * n, x, n);
        y[i] = accumulate ? y[i] + acc : acc;
    }
}

template <class T>
void gemv_t_scalar(std::size_t m, std::size_t n, const T* a, const T* x, T* y, bool accumulate) {
    if (!accumulate) std::memset(y, 0, n * sizeof(T));
    for (std::size_t i = 0; i < m; ++i) axpy_scalar(n, x[i], a + i * n, y);
}

template <class T>
void ger_scalar(std::size_t m, std::size_t n, T alpha, const T* x, const T* y, T* a) {
    for (std::size_t i = 0; i < m; ++i) {
        T ax = alpha * x[i];
        T* row = a + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] += ax * y[j];
    }
}

template <class T>
void gemm_scalar(std::size_t m, std::size_t n, std::size_t k,
                 const T* a, const T* b, T* c, bool accumulate) {
    if (!accumulate) std::memset(c, 0, m * n * sizeof(T));
    for (std::size_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        T* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            T av = arow[p];
            const T* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
void gemm_nt_scalar(std::size_t m, std::size_t n, std::size_t k,
                    const T* a, const T* b, T* c, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            T acc = dot_scalar(a + i * k, b + j * k, k);
            T& out = c[i * n + j];
            out = accumulate ? out + acc : acc;
        }
}

template <class T>
void gemm_tn_scalar(std::size_t m, std::size_t k, std::size_t n,
                    const T* a, const T* b, T* c, bool accumulate) {
    if (!accumulate) std::memset(c, 0, k * n * sizeof(T));
    for (std::size_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        const T* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) axpy_scalar(n, arow[p], brow, c + p * n);
    }
}

} // namespace

namespace detail {

template <class T>
void fill_scalar(OpTable<T>& t) {
    t.dot = dot_scalar<T>;
    t.axpy = axpy_scalar<T>;
    t.scale_div = scale_div_scalar<T>;
    t.mul = mul_scalar<T>;
    t.add = add_scalar<T>;
    t.abs_max = abs_max_scalar<T>;
    t.relu_fwd = relu_fwd_scalar<T>;
    t.relu_bwd = relu_bwd_scalar<T>;
    t.elu_fwd = elu_fwd_scalar<T>;
    t.elu_bwd = elu_bwd_scalar<T>;
    t.gemv = gemv_scalar<T>;
    t.gemv_t = gemv_t_scalar<T>;
    t.ger = ger_scalar<T>;
    t.gemm = gemm_scalar<T>;
    t.gemm_nt = gemm_nt_scalar<T>;
    t.gemm_tn = gemm_tn_scalar<T>;
}

template void fill_scalar<float>(OpTable<float>&);
template void fill_scalar<double>(OpTable<double>&);

} // namespace detail

namespace {

struct Dispatch {
    Backend backend = Backend::scalar;
    OpTable<float> f32{};
    OpTable<double> f64{};

    void select(Backend b) {
        if (!supported(b)) throw std::invalid_argument("kernel backend not supported on this CPU: " + std::string(name(b)));
        backend = b;
        detail::fill_scalar(f32);
        detail::fill_scalar(f64);
        if (b == Backend::avx2) {
            detail::fill_avx2(f32);
            detail::fill_avx2(f64);
        }
    }
};

Dispatch& dispatch() {
    static Dispatch d = [] {
        Dispatch init;
        Backend pick = detail::cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
        if (const char* env = std::getenv("EEGCLF_KERNELS")) {
            std::string_view v(env);
            if (v == "scalar") pick = Backend::scalar;
            else if (v == "avx2") pick = Backend::avx2;
            else if (v != "auto" && !v.empty())
                throw std::invalid_argument("EEGCLF_KERNELS must be scalar, avx2 or auto");
        }
        init.select(pick);
        return init;
    }();
    return d;
}

} // namespace

Backend active() { return dispatch().backend; }

bool supported(Backend b) {
    switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return detail::cpu_has_avx2();
    }
    return false;
}

std::string_view name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    }
    return "?";
}

void force(Backend b) { dispatch().select(b); }

template <>
const OpTable<float>& table<float>() { return dispatch().f32; }
template <>
const OpTable<double>& table<double>() { return dispatch().f64; }

} // namespace eegclf::kernels
