#pragma once

#include <complex>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace tlsdd::detail {

// RAII wrappers around the FFTW plan/buffer lifecycle.
struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

class RealToComplex {
 public:
  explicit RealToComplex(int n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))),
        plan_(fftw_plan_dft_r2c_1d(n, in_.get(), out_.get(), FFTW_ESTIMATE)) {}
  ~RealToComplex() { fftw_destroy_plan(plan_); }
  RealToComplex(const RealToComplex&) = delete;
  RealToComplex& operator=(const RealToComplex&) = delete;

  double* input() { return in_.get(); }
  std::complex<double> output(int k) const { return {out_.get()[k][0], out_.get()[k][1]}; }
  void execute() { fftw_execute(plan_); }
  int size() const { return n_; }

 private:
  int n_;
  std::unique_ptr<double, FftwDeleter> in_;
  std::unique_ptr<fftw_complex, FftwDeleter> out_;
  fftw_plan plan_;
};

class ComplexToReal {
 public:
  explicit ComplexToReal(int n)
      : in_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))),
        out_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        plan_(fftw_plan_dft_c2r_1d(n, in_.get(), out_.get(), FFTW_ESTIMATE)) {}
  ~ComplexToReal() { fftw_destroy_plan(plan_); }
  ComplexToReal(const ComplexToReal&) = delete;
  ComplexToReal& operator=(const ComplexToReal&) = delete;

  fftw_complex* input() { return in_.get(); }
  const double* output() const { return out_.get(); }
  void execute() { fftw_execute(plan_); }

 private:
  std::unique_ptr<fftw_complex, FftwDeleter> in_;
  std::unique_ptr<double, FftwDeleter> out_;
  fftw_plan plan_;
};

// Planner calls are not thread-safe in FFTW.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace tlsdd::detail
