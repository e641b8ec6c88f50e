#include "eulerfe/fft.hpp"

#include <algorithm>
#include <stdexcept>

#include <fftw3.h>

namespace eulerfe {

struct Fft2::Impl {
  int n = 0;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(int size) : n(size) {
    const size_t count = static_cast<size_t>(n) * n;
    in = fftw_alloc_complex(count);
    out = fftw_alloc_complex(count);
    forward = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(in);
    fftw_free(out);
  }

  std::vector<Complex> run(fftw_plan plan, const Complex* data, double scale) const {
    const size_t count = static_cast<size_t>(n) * n;
    std::copy(data, data + count, reinterpret_cast<Complex*>(in));
    fftw_execute(plan);
    std::vector<Complex> result(count);
    const Complex* o = reinterpret_cast<const Complex*>(out);
    for (size_t k = 0; k < count; ++k) result[k] = o[k] * scale;
    return result;
  }
};

Fft2::Fft2(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("Fft2: N must be at least 2");
  impl_ = std::make_unique<Impl>(n);
}

Fft2::~Fft2() = default;
Fft2::Fft2(Fft2&&) noexcept = default;
Fft2& Fft2::operator=(Fft2&&) noexcept = default;

std::vector<Complex> Fft2::forward(const std::vector<double>& values) const {
  if (values.size() != static_cast<size_t>(n_) * n_) throw std::invalid_argument("Fft2: size mismatch");
  std::vector<Complex> c(values.begin(), values.end());
  return impl_->run(impl_->forward, c.data(), 1.0);
}

std::vector<Complex> Fft2::forward(const std::vector<Complex>& values) const {
  if (values.size() != static_cast<size_t>(n_) * n_) throw std::invalid_argument("Fft2: size mismatch");
  return impl_->run(impl_->forward, values.data(), 1.0);
}

std::vector<Complex> Fft2::inverse(const std::vector<Complex>& modes) const {
  if (modes.size() != static_cast<size_t>(n_) * n_) throw std::invalid_argument("Fft2: size mismatch");
  return impl_->run(impl_->backward, modes.data(), 1.0 / (static_cast<double>(n_) * n_));
}

std::vector<double> Fft2::inverse_real(const std::vector<Complex>& modes) const {
  const std::vector<Complex> c = inverse(modes);
  std::vector<double> r(c.size());
  for (size_t k = 0; k < c.size(); ++k) r[k] = c[k].real();
  return r;
}

}  // namespace eulerfe
