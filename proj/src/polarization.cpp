#include <cmath>
#include <random>

#include "polarize/error.hpp"
#include "polarize/hierarchy.hpp"

namespace polarize {

PolarizationImage polarization_image(PolarizationKind kind, int output_dim, std::optional<std::pair<int, int>> shape) {
  const auto q = static_cast<std::size_t>(output_dim);
  switch (kind) {
    case PolarizationKind::Identity:
      return [q](std::span<const double> a, std::span<const double> b) {
        std::vector<double> out(q * q);
        for (std::size_t r = 0; r < q; ++r) {
          for (std::size_t r2 = 0; r2 < q; ++r2) out[r * q + r2] = a[r] * a[r2] + b[r] * b[r2];
        }
        return out;
      };
    case PolarizationKind::HilbertSchmidt:
      return [q](std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (std::size_t r = 0; r < q; ++r) s += a[r] * a[r] + b[r] * b[r];
        return std::vector<double>{s};
      };
    case PolarizationKind::MatrixProduct: {
      if (!shape) {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(output_dim))));
        if (side * side != output_dim) {
          throw Error(ErrorKind::ShapeRequired, "matrix-product polarization needs an output shape");
        }
        shape = std::make_pair(side, side);
      }
      const auto [rows, cols] = *shape;
      if (rows * cols != output_dim) throw Error(ErrorKind::InvalidShape, "shape does not match output_dim");
      return [rows, cols](std::span<const double> a, std::span<const double> b) {
        std::vector<double> out(static_cast<std::size_t>(cols * cols), 0.0);
        for (int j = 0; j < cols; ++j) {
          for (int k = 0; k < cols; ++k) {
            double s = 0.0;
            for (int i = 0; i < rows; ++i) {
              const auto ij = static_cast<std::size_t>(i * cols + j);
              const auto ik = static_cast<std::size_t>(i * cols + k);
              s += a[ij] * a[ik] + b[ij] * b[ik];
            }
            out[static_cast<std::size_t>(j * cols + k)] = s;
          }
        }
        return out;
      };
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown polarization kind");
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

bool check_pi_soundness(const PolarizationImage& image, int output_dim, int samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const auto q = static_cast<std::size_t>(output_dim);
  std::vector<double> a(q), b(q), zero(q, 0.0);
  for (int k = 0; k < samples; ++k) {
    do {
      for (auto& x : a) x = gauss(rng);
    } while (norm2(a) == 0.0);
    for (auto& x : b) x = gauss(rng);
    // a (x) a alone, then a pair
    const double scale_a = norm2(a) * norm2(a);
    if (norm2(image(a, zero)) <= 1e-12 * scale_a) return false;
    const double scale_ab = scale_a + norm2(b) * norm2(b);
    if (norm2(image(a, b)) <= 1e-12 * scale_ab) return false;
  }
  return true;
}

bool check_pi_soundness(PolarizationKind kind, int output_dim, int samples, std::uint64_t seed,
                        std::optional<std::pair<int, int>> shape) {
  return check_pi_soundness(polarization_image(kind, output_dim, shape), output_dim, samples, seed);
}

}  // namespace polarize
