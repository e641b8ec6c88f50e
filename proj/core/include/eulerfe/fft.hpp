#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace eulerfe {

using Complex = std::complex<double>;

/// Unnormalized 2D DFT on an N x N periodic lattice. Grid values are stored
/// x-fastest: values[i + N * j] is the sample at (i / N, j / N); modes use the
/// same layout with signed wavenumbers wavenumber(i), wavenumber(j).
class Fft2 {
 public:
  explicit Fft2(int n);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;
  Fft2(Fft2&&) noexcept;
  Fft2& operator=(Fft2&&) noexcept;

  int size() const { return n_; }
  int wavenumber(int index) const { return index <= n_ / 2 ? index : index - n_; }

  std::vector<Complex> forward(const std::vector<double>& values) const;
  std::vector<Complex> forward(const std::vector<Complex>& values) const;
  /// Inverse including the 1 / N^2 factor.
  std::vector<Complex> inverse(const std::vector<Complex>& modes) const;
  std::vector<double> inverse_real(const std::vector<Complex>& modes) const;

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace eulerfe
