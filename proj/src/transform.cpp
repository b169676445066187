#include "fse/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace fse {

TransformCounters& transform_counters() {
    static TransformCounters counters;
    return counters;
}

namespace {

// One ESTIMATE plan per (size, direction), created against aligned dummy
// buffers and re-executed on caller buffers via the new-array interface.
class PlanCache {
  public:
    fftw_plan get(int t, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(t, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        const size_t n = static_cast<size_t>(t) * t;
        fftw_complex* buf = fftw_alloc_complex(n);
        if (!buf) throw std::bad_alloc();
        fftw_plan plan = fftw_plan_dft_2d(t, t, buf, buf, sign, FFTW_ESTIMATE);
        fftw_free(buf);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void execute(int t, int sign, const std::complex<double>* in, std::complex<double>* out) {
    if (t < 1) throw std::invalid_argument("transform size must be >= 1");
    fftw_plan plan = plan_cache().get(t, sign);
    const size_t n = static_cast<size_t>(t) * t;
    // fftw_malloc guarantees the alignment the cached plan was built with.
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_complex* b = fftw_alloc_complex(n);
    if (!a || !b) {
        fftw_free(a);
        fftw_free(b);
        throw std::bad_alloc();
    }
    for (size_t i = 0; i < n; ++i) {
        a[i][0] = in[i].real();
        a[i][1] = in[i].imag();
    }
    fftw_execute_dft(plan, a, b);
    for (size_t i = 0; i < n; ++i) out[i] = {b[i][0], b[i][1]};
    fftw_free(a);
    fftw_free(b);
}

}  // namespace

void dft2d_forward(int t, const std::complex<double>* in, std::complex<double>* out) {
    execute(t, FFTW_FORWARD, in, out);
    transform_counters().forward.fetch_add(1, std::memory_order_relaxed);
}

void dft2d_inverse(int t, const std::complex<double>* in, std::complex<double>* out) {
    execute(t, FFTW_BACKWARD, in, out);
    transform_counters().inverse.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace fse
