#ifndef FLATMODULI_TORUS_FFT_HPP
#define FLATMODULI_TORUS_FFT_HPP

#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "flatmoduli/common.hpp"

namespace flatmoduli::torus {

// Thin cache around FFTW plans.  Plans own a scratch buffer; callers' data is
// copied through it, which keeps alignment concerns out of the call sites and
// is negligible at the grid sizes used here.
class Fft {
   public:
    // unnormalized analysis: X_k = sum_x v_x e^{-2 pi i k.x/N}
    static void forward(const std::vector<int>& dims, Complex* data) { run(dims, data, FFTW_FORWARD); }
    // unnormalized synthesis: v_x = sum_k X_k e^{+2 pi i k.x/N}
    static void backward(const std::vector<int>& dims, Complex* data) { run(dims, data, FFTW_BACKWARD); }

    static long count(const std::vector<int>& dims) {
        long c = 1;
        for (int d : dims) c *= d;
        return c;
    }

   private:
    struct Plan {
        fftw_plan plan = nullptr;
        fftw_complex* buf = nullptr;
        long n = 0;
        Plan() = default;
        Plan(const Plan&) = delete;
        Plan& operator=(const Plan&) = delete;
        ~Plan() {
            if (plan) fftw_destroy_plan(plan);
            if (buf) fftw_free(buf);
        }
    };

    static void run(const std::vector<int>& dims, Complex* data, int sign) {
        static std::map<std::pair<std::vector<int>, int>, Plan> cache;
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(dims, sign);
        Plan& p = cache[key];
        if (!p.plan) {
            p.n = count(dims);
            p.buf = fftw_alloc_complex(static_cast<size_t>(p.n));
            p.plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p.buf, p.buf, sign,
                                   FFTW_ESTIMATE);
        }
        auto* buf = reinterpret_cast<Complex*>(p.buf);
        std::copy(data, data + p.n, buf);
        fftw_execute(p.plan);
        std::copy(buf, buf + p.n, data);
    }
};

}  // namespace flatmoduli::torus

#endif
