#include "privcurve/rng.h"

#include <cmath>

namespace privcurve {
namespace {

// SplitMix64 (Steele, Lea, Flood 2014): used only to whiten seeds into
// Philox keys, never as the sampling generator itself.
uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& ctr,
                         const std::array<uint32_t, 2>& key) {
  const uint64_t p0 = uint64_t{kPhiloxM0} * ctr[0];
  const uint64_t p1 = uint64_t{kPhiloxM1} * ctr[2];
  const uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
  const uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

namespace detail {

std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> ctr,
                                      std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

}  // namespace detail

RngStream RngStream::substream(uint64_t child) const {
  // Child ids are mixed through two SplitMix64 rounds so that (id, child)
  // collisions across different parents are negligible.
  return RngStream{master_seed,
                   splitmix64(splitmix64(stream_id) ^ (child + 0x51ED2701u))};
}

Philox::Philox(RngStream stream, uint64_t start_block) : block_(start_block) {
  const uint64_t a = splitmix64(stream.master_seed);
  const uint64_t b = splitmix64(a ^ stream.stream_id);
  const uint64_t c = splitmix64(b);
  key_ = {uint32_t(b), uint32_t(b >> 32)};
  block_hi_ = {uint32_t(c), uint32_t(c >> 32)};
}

void Philox::refill() {
  const std::array<uint32_t, 4> ctr = {uint32_t(block_), uint32_t(block_ >> 32),
                                       block_hi_[0], block_hi_[1]};
  buf_ = detail::philox4x32_10(ctr, key_);
  ++block_;
  buf_pos_ = 0;
}

uint64_t Philox::next_u64() {
  if (buf_pos_ > 2) refill();
  const uint64_t lo = buf_[buf_pos_];
  const uint64_t hi = buf_[buf_pos_ + 1];
  buf_pos_ += 2;
  return lo | (hi << 32);
}

double Philox::next_double() {
  // 53 random bits, centered in the cell: strictly inside (0,1), so log()
  // and quantile() downstream never see an endpoint.
  return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Philox::next_gaussian() {
  if (have_cached_gauss_) {
    have_cached_gauss_ = false;
    return cached_gauss_;
  }
  const double u1 = next_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_gauss_ = r * std::sin(theta);
  have_cached_gauss_ = true;
  return r * std::cos(theta);
}

}  // namespace privcurve
