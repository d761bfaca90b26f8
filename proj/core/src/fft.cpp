// SPDX-License-Identifier: Apache-2.0
#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "mfginv/errors.hpp"

namespace mfginv::detail {
namespace {

struct Buffer {
  fftw_complex* ptr = nullptr;
  std::size_t len = 0;
  explicit Buffer(std::size_t n) : ptr(fftw_alloc_complex(n)), len(n) {
    if (!ptr) throw NumericalError("fft: allocation failed");
  }
  ~Buffer() { fftw_free(ptr); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mu_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    int dims[3] = {n, n, n};
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(n);
    Buffer scratch(total);
    fftw_plan p = fftw_plan_dft(dim, dims, scratch.ptr, scratch.ptr,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!p) throw NumericalError("fft: planning failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, int dim, int n, int sign) {
  fftw_plan p = cache().get(dim, n, sign);
  // Execute on an aligned copy: new-array execution requires the planner's alignment.
  Buffer buf(data.size());
  std::memcpy(buf.ptr, data.data(), data.size() * sizeof(fftw_complex));
  fftw_execute_dft(p, buf.ptr, buf.ptr);
  std::memcpy(static_cast<void*>(data.data()), buf.ptr, data.size() * sizeof(fftw_complex));
}

}  // namespace mfginv::detail
