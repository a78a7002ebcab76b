#ifndef ECHOFORGE_FFT_H_
#define ECHOFORGE_FFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace echoforge {

using Complex = std::complex<double>;

// Real-input DFT of a fixed power-of-two size, backed by FFTW.
//
// Forward is unnormalized: X[k] = sum_n x[n] e^{-j2pi kn/N}, k = 0..N/2.
// Inverse includes the 1/N factor, so Inverse(Forward(x)) == x.
// An instance owns scratch buffers and is not safe for concurrent use;
// give every stream its own.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t num_bins() const { return size_ / 2 + 1; }

  void Forward(std::span<const double> in, std::span<Complex> out);
  void Inverse(std::span<const Complex> in, std::span<double> out);

 private:
  struct Plans;
  std::size_t size_;
  std::unique_ptr<Plans> plans_;
};

bool IsPowerOfTwo(std::size_t n);

}  // namespace echoforge

#endif  // ECHOFORGE_FFT_H_
