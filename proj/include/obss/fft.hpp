// Thin FFTW wrapper: cached in-place 3D complex transforms per grid size.
#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>

namespace obss {

class Fft3 {
 public:
  explicit Fft3(int n) : n_(n) {
    // Plan on a scratch buffer; FFTW_UNALIGNED lets us execute on any
    // std::vector storage afterwards.
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n * n);
    fwd_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
  }
  ~Fft3() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  // In place, no scaling on either direction; callers own the 1/n^3.
  void forward(std::complex<double>* data) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
  }
  void backward(std::complex<double>* data) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
  }

 private:
  int n_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

// Shared plan cache. Planning is not thread safe; execution on distinct
// buffers is.
inline const Fft3& fft_for(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Fft3>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft3>(n);
  return *slot;
}

}  // namespace obss
