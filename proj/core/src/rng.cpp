#include "mfchaos/rng.hpp"

namespace mfchaos {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) noexcept {
  return mix64(mix64(root) ^ mix64(tag ^ 0x5851f42d4c957f2dULL));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t replica, std::uint64_t particle,
                     std::uint64_t stream) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ replica);
  h = mix64(h ^ (particle * 0xd1342543de82ef95ULL));
  h = mix64(h ^ (stream * 0xaf251af3b0f025b5ULL));
  for (auto& word : s_) {
    h += kGolden;
    word = mix64(h);
  }
}

RngStream::result_type RngStream::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

}  // namespace mfchaos
