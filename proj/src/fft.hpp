#pragma once

#include <complex>
#include <vector>

namespace mgale::fft {

// out[k] = sum_j in[j] e^{-2 pi i jk/N}
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in);
// out[k] = sum_j in[j] e^{+2 pi i jk/N}, unnormalized
std::vector<std::complex<double>> backward(const std::vector<std::complex<double>>& in);

// Linear convolution of a and b (length a.size() + b.size() - 1).
std::vector<std::complex<double>> convolve(const std::vector<std::complex<double>>& a,
                                           const std::vector<std::complex<double>>& b);

}  // namespace mgale::fft
