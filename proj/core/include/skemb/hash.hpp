#pragma once

#include <cstdint>
#include <string_view>

namespace skemb {

// splitmix64 finalizer. Used for seed derivation and hash parameter setup.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Role-tagged sub-seed derivation. Every random decision in the toolkit flows
// from a single master seed through this function, so independent streams
// (hash parameters, samplers, trials) never alias and any run is pinned by
// one seed value.
std::uint64_t derive_seed(std::uint64_t master, std::string_view role,
                          std::uint64_t index = 0);

// 2-universal hash into [0, range): Carter-Wegman h(x) = ((a*mix64(x) + b)
// mod p) mod range with p = 2^61 - 1, a in [1, p), b in [0, p). mix64 is a
// fixed bijection, so the pairwise collision bound survives except for key
// pairs whose mixed values alias mod p (probability ~2^-61, negligible next
// to the 1/range term). Without the mix, the affine map leaves a lattice
// over consecutive keys — whenever a mod range is degenerate (e.g. range
// divides a) long runs of adjacent keys share a bucket — and vertex ids are
// exactly such runs. The family and its parameter derivation are fixed;
// sketches built from equal (seed, role) pairs are identical across versions.
class UniversalHash {
 public:
  static constexpr std::uint64_t kPrime = (1ULL << 61) - 1;

  UniversalHash() = default;
  UniversalHash(std::uint64_t seed, std::string_view role, std::uint64_t range);

  std::uint64_t operator()(std::uint64_t x) const {
    unsigned __int128 t = static_cast<unsigned __int128>(a_) * mix64(x) + b_;
    std::uint64_t r = static_cast<std::uint64_t>(t & kPrime) +
                      static_cast<std::uint64_t>(t >> 61);
    r = (r & kPrime) + (r >> 61);
    if (r >= kPrime) r -= kPrime;
    return r % range_;
  }

  std::uint64_t range() const { return range_; }

 private:
  std::uint64_t a_ = 1;
  std::uint64_t b_ = 0;
  std::uint64_t range_ = 1;
};

// ±1-valued hash backed by a UniversalHash with range 2.
class SignHash {
 public:
  SignHash() = default;
  SignHash(std::uint64_t seed, std::string_view role) : h_(seed, role, 2) {}
  int operator()(std::uint64_t x) const { return h_(x) ? -1 : +1; }

 private:
  UniversalHash h_;
};

}  // namespace skemb
