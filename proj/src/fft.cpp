#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace mgale::fft {
namespace {

std::mutex plan_mutex;

// Plans are created once per (size, sign) and executed on caller buffers
// through the new-array interface.
fftw_plan plan_for(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  std::vector<std::complex<double>> a(n), b(n);
  fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(std::make_pair(n, sign), p);
  return p;
}

std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& in, int sign) {
  std::vector<std::complex<double>> out(in.size());
  if (in.empty()) return out;
  if (in.size() == 1) {
    out[0] = in[0];
    return out;
  }
  fftw_plan p = plan_for(static_cast<int>(in.size()), sign);
  auto src = in;
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in) {
  return run(in, FFTW_FORWARD);
}

std::vector<std::complex<double>> backward(const std::vector<std::complex<double>>& in) {
  return run(in, FFTW_BACKWARD);
}

std::vector<std::complex<double>> convolve(const std::vector<std::complex<double>>& a,
                                           const std::vector<std::complex<double>>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < len) n <<= 1;
  std::vector<std::complex<double>> pa(n), pb(n);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  auto fa = forward(pa);
  auto fb = forward(pb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  auto c = backward(fa);
  c.resize(len);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : c) v *= inv;
  return c;
}

}  // namespace mgale::fft
