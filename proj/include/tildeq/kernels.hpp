#pragma once

// Double-precision inner-loop kernels behind the tape ops, the trainer and
// the loss reductions. A scalar reference implementation always exists; an
// AVX2/FMA variant is selected once at startup when the CPU supports it.
// Matrices are dense row-major.

#include <cstddef>

namespace tildeq::kernels {

struct Ops {
    // reductions
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*sumsq)(const double* a, std::size_t n);
    // elementwise, out may alias inputs
    void (*add)(const double* a, const double* b, double* out, std::size_t n);
    void (*sub)(const double* a, const double* b, double* out, std::size_t n);
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    void (*scale)(double alpha, const double* x, double* out, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n); // y += alpha*x
    // dense row-major linear algebra
    void (*matvec)(const double* m, const double* x, double* y,
                   std::size_t rows, std::size_t cols);   // y = M x
    void (*matvec_t)(const double* m, const double* x, double* y,
                     std::size_t rows, std::size_t cols); // y = M^T x
    void (*outer_acc)(double* m, const double* x, const double* y,
                      std::size_t rows, std::size_t cols); // M += x y^T
    // fused Adam update over one flat parameter block
    void (*adam_step)(double* p, double* m, double* v, const double* g,
                      std::size_t n, double lr, double beta1, double beta2,
                      double eps, double bc1, double bc2);
};

// Reference kernels (always available, used as the equivalence oracle).
const Ops& scalar_ops();

// Dispatched kernels: AVX2+FMA when the host supports it, scalar otherwise.
const Ops& ops();

// Name of the dispatched variant: "avx2" or "scalar".
const char* active_isa();

// AVX2 table when this build carries it and the CPU can run it; else nullptr.
const Ops* avx2_ops();

// Thin forwarding wrappers so call sites stay readable.
inline double dot(const double* a, const double* b, std::size_t n) { return ops().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return ops().sum(a, n); }
inline double sumsq(const double* a, std::size_t n) { return ops().sumsq(a, n); }
inline void add(const double* a, const double* b, double* o, std::size_t n) { ops().add(a, b, o, n); }
inline void sub(const double* a, const double* b, double* o, std::size_t n) { ops().sub(a, b, o, n); }
inline void mul(const double* a, const double* b, double* o, std::size_t n) { ops().mul(a, b, o, n); }
inline void scale(double al, const double* x, double* o, std::size_t n) { ops().scale(al, x, o, n); }
inline void axpy(double al, const double* x, double* y, std::size_t n) { ops().axpy(al, x, y, n); }
inline void matvec(const double* m, const double* x, double* y, std::size_t r, std::size_t c) { ops().matvec(m, x, y, r, c); }
inline void matvec_t(const double* m, const double* x, double* y, std::size_t r, std::size_t c) { ops().matvec_t(m, x, y, r, c); }
inline void outer_acc(double* m, const double* x, const double* y, std::size_t r, std::size_t c) { ops().outer_acc(m, x, y, r, c); }

} // namespace tildeq::kernels
