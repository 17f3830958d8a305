#include "epipanel/rng.hpp"

#include <cmath>
#include <numeric>

namespace epipanel {

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed) {
  return fnv1a64(text.data(), text.size(), seed);
}

std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view scope,
                          std::uint64_t index) {
  std::uint64_t h = fnv1a64(&root_seed, sizeof(root_seed));
  h = fnv1a64(scope, h);
  h = fnv1a64(&index, sizeof(index), h);
  // Zero seeds default-construct mt19937_64 differently; avoid them.
  return h == 0 ? 0x9e3779b97f4a7c15ULL : h;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % n;
}

double Rng::normal(double mean, double sd) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sd * spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return mean + sd * u * factor;
}

std::vector<std::uint32_t> Rng::shuffled_indices(std::uint32_t n) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::uint32_t i = n; i > 1; --i) {
    const auto j = static_cast<std::uint32_t>(uniform_int(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace epipanel
