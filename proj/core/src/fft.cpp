#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "pulselab/error.hpp"

namespace pulselab::detail {
namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex g_plan_mutex;

fftw_plan plan_for(int n) {
    static std::map<int, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw Error(Errc::invalid_argument, "fftw could not plan transform");
    plans.emplace(n, p);
    return p;
}

}  // namespace

void inverse_dft(std::vector<std::complex<double>>& data) {
    const int n = static_cast<int>(data.size());
    if (n == 0) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_for(n), buf, buf);
}

}  // namespace pulselab::detail
