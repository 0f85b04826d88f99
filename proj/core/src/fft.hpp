#pragma once

#include <complex>
#include <vector>

namespace pulselab::detail {

// In-place unnormalized inverse DFT, sum_k x_k exp(+2 pi i k n / N).
// Safe to call concurrently; plans are built once per size under a lock.
void inverse_dft(std::vector<std::complex<double>>& data);

}  // namespace pulselab::detail
