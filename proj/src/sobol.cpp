#include "maobo/sobol.hpp"

#include <bit>

#include "maobo/errors.hpp"
#include "maobo/random.hpp"

namespace maobo {
namespace {

// Joe & Kuo (new-joe-kuo-6.21201) parameters for dimensions 2..10:
// degree s, coefficient word a, initial direction integers m_1..m_s.
struct Primitive {
  int degree;
  std::uint32_t coeffs;
  std::array<std::uint32_t, 5> m;
};

constexpr std::array<Primitive, SobolSequence::kMaxDim - 1> kPrimitives{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
}};

std::array<std::uint32_t, SobolSequence::kBits> direction_numbers(std::size_t dim_index) {
  constexpr int bits = SobolSequence::kBits;
  std::array<std::uint32_t, bits> v{};
  if (dim_index == 0) {
    for (int k = 0; k < bits; ++k) v[k] = 1u << (bits - 1 - k);
    return v;
  }
  const Primitive& p = kPrimitives[dim_index - 1];
  std::array<std::uint32_t, bits> m{};
  for (int k = 0; k < p.degree; ++k) m[k] = p.m[k];
  for (int k = p.degree; k < bits; ++k) {
    std::uint32_t value = m[k - p.degree] ^ (m[k - p.degree] << p.degree);
    for (int l = 1; l < p.degree; ++l) {
      const std::uint32_t bit = (p.coeffs >> (p.degree - 1 - l)) & 1u;
      if (bit) value ^= m[k - l] << l;
    }
    m[k] = value;
  }
  for (int k = 0; k < bits; ++k) v[k] = m[k] << (bits - 1 - k);
  return v;
}

}  // namespace

SobolSequence::SobolSequence(std::size_t dim, std::uint64_t scramble_seed)
    : dim_(dim), state_(dim, 0u), shift_(dim, 0u) {
  if (dim == 0 || dim > kMaxDim)
    throw UnsupportedDimension("Sobol sequence supports 1.." + std::to_string(kMaxDim) +
                               " dimensions, got " + std::to_string(dim));
  directions_.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) directions_.push_back(direction_numbers(j));
  if (scramble_seed != 0) {
    Rng rng(scramble_seed);
    for (auto& s : shift_) s = static_cast<std::uint32_t>(rng() >> 32);
  }
}

Eigen::VectorXd SobolSequence::next() {
  constexpr double scale = 1.0 / 4294967296.0;
  Eigen::VectorXd point(static_cast<Eigen::Index>(dim_));
  if (index_ > 0) {
    // Gray code update: flip the direction for the lowest zero bit of index-1.
    const int c = std::countr_one(index_ - 1);
    if (c >= kBits) throw InvalidInput("Sobol sequence exhausted");
    for (std::size_t j = 0; j < dim_; ++j) state_[j] ^= directions_[j][c];
  }
  for (std::size_t j = 0; j < dim_; ++j)
    point[static_cast<Eigen::Index>(j)] = static_cast<double>(state_[j] ^ shift_[j]) * scale;
  ++index_;
  return point;
}

Eigen::MatrixXd SobolSequence::take(std::size_t n) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < n; ++i) out.row(static_cast<Eigen::Index>(i)) = next().transpose();
  return out;
}

Eigen::MatrixXd sobol_in_box(const Box& box, std::size_t n, std::uint64_t seed) {
  // Seed 0 would disable the shift; remap so every seed scrambles.
  SobolSequence seq(box.dim(), seed == 0 ? 0x5EEDull : seed);
  return box.scale(seq.take(n));
}

}  // namespace maobo
