#include "echoforge/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "echoforge/errors.h"

namespace echoforge {
namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct RealFft::Plans {
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~Plans() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    fftw_free(real);
    fftw_free(spectrum);
  }
};

bool IsPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

RealFft::RealFft(std::size_t size) : size_(size), plans_(std::make_unique<Plans>()) {
  if (!IsPowerOfTwo(size) || size < 2) {
    throw ConfigError("FFT size must be a power of two >= 2");
  }
  std::lock_guard<std::mutex> lock(PlannerMutex());
  plans_->real = fftw_alloc_real(size);
  plans_->spectrum = fftw_alloc_complex(size / 2 + 1);
  const int n = static_cast<int>(size);
  plans_->forward = fftw_plan_dft_r2c_1d(n, plans_->real, plans_->spectrum, FFTW_ESTIMATE);
  plans_->inverse = fftw_plan_dft_c2r_1d(n, plans_->spectrum, plans_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::Forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != size_ || out.size() != num_bins()) {
    throw ShapeError("RealFft::Forward: size mismatch");
  }
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->forward);
  const auto* spec = reinterpret_cast<const Complex*>(plans_->spectrum);
  std::copy(spec, spec + num_bins(), out.begin());
}

void RealFft::Inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != num_bins() || out.size() != size_) {
    throw ShapeError("RealFft::Inverse: size mismatch");
  }
  auto* spec = reinterpret_cast<Complex*>(plans_->spectrum);
  std::copy(in.begin(), in.end(), spec);
  // c2r ignores the imaginary parts of DC and Nyquist; zero them so the
  // result does not depend on garbage there.
  spec[0] = Complex(spec[0].real(), 0.0);
  spec[size_ / 2] = Complex(spec[size_ / 2].real(), 0.0);
  fftw_execute(plans_->inverse);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = plans_->real[i] * scale;
}

}  // namespace echoforge
