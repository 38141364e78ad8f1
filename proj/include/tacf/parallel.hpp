#pragma once

#include <exception>
#include <mutex>

namespace tacf {

/// Thread count used by the OpenMP kernels. `requested <= 0` means the OpenMP
/// default (OMP_NUM_THREADS or the number of processors).
int resolve_threads(int requested);

// Exceptions must not escape an OpenMP region. Loop bodies run through
// capture(); the first exception is rethrown after the region.
class FirstError {
 public:
  template <typename Body>
  void capture(Body&& body) noexcept {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace tacf
