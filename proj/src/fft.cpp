#include "phi4/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace phi4::fft {
namespace {

std::mutex plan_mutex;

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plans created once per size with FFTW_ESTIMATE on aligned scratch, then
// executed via the new-array interface.
PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n) * n);
  PlanPair p;
  p.fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(buf);
  return cache.emplace(n, p).first->second;
}

fftw_complex* as_fftw(const std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(p));
}

}  // namespace

void forward(int n, const std::complex<double>* in, std::complex<double>* out) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_execute_dft(plans_for(n).fwd, as_fftw(in), as_fftw(out));
}

void backward(int n, const std::complex<double>* in, std::complex<double>* out) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_execute_dft(plans_for(n).bwd, as_fftw(in), as_fftw(out));
}

void forward_1d(int n, const std::complex<double>* in, std::complex<double>* out) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  static std::map<int, fftw_plan> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    it = cache.emplace(n, p).first;
  }
  fftw_execute_dft(it->second, as_fftw(in), as_fftw(out));
}

}  // namespace phi4::fft
