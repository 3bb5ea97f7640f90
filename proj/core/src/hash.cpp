#include "skemb/hash.hpp"

namespace skemb {

std::uint64_t derive_seed(std::uint64_t master, std::string_view role,
                          std::uint64_t index) {
  std::uint64_t h = mix64(master ^ 0x1f3d5b79a6c8e02eULL);
  for (unsigned char ch : role) h = mix64(h ^ ch);
  return mix64(h ^ index);
}

namespace {

// Draw a uniform value below UniversalHash::kPrime from a mix64 chain.
std::uint64_t draw_below_prime(std::uint64_t& state) {
  for (;;) {
    state = mix64(state);
    std::uint64_t v = state & UniversalHash::kPrime;
    if (v != UniversalHash::kPrime) return v;
  }
}

}  // namespace

UniversalHash::UniversalHash(std::uint64_t seed, std::string_view role,
                             std::uint64_t range)
    : range_(range ? range : 1) {
  std::uint64_t state = derive_seed(seed, role);
  do {
    a_ = draw_below_prime(state);
  } while (a_ == 0);
  b_ = draw_below_prime(state);
}

}  // namespace skemb
