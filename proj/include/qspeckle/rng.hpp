#pragma once

#include <cstdint>
#include <random>

namespace qspeckle {

/// splitmix64 step: passes standard statistical batteries and is the
/// recommended seeder for other generators.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Domain tags keep substreams for unrelated purposes disjoint even when
/// their indices coincide.
enum class StreamDomain : std::uint64_t {
  Realization = 1,      // one disorder realization of the ensemble
  Calibration = 2,      // slice-strength calibration probes
  Oracle = 3,           // oracle cross-check unitaries
  Replacement = 4,      // unused; replacement realizations reuse Realization
};

/// Counter-based substream derivation: the generator returned for
/// (master_seed, domain, index) is a pure function of those three values,
/// independent of call order, thread schedule, or worker count.
class SubstreamFactory {
 public:
  explicit SubstreamFactory(std::uint64_t master_seed) : master_(master_seed) {}

  std::uint64_t master_seed() const { return master_; }

  std::mt19937_64 make(StreamDomain domain, std::uint64_t index) const {
    // Three splitmix64 rounds over the mixed key give well-separated seeds
    // for any (domain, index) lattice.
    std::uint64_t key = master_;
    key ^= 0x632be59bd9b4e019ULL + static_cast<std::uint64_t>(domain);
    std::uint64_t s = key;
    std::uint64_t a = splitmix64(s);
    s ^= index * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(s);
    std::uint64_t c = splitmix64(s);
    std::seed_seq seq{static_cast<unsigned>(a), static_cast<unsigned>(a >> 32),
                      static_cast<unsigned>(b), static_cast<unsigned>(b >> 32),
                      static_cast<unsigned>(c), static_cast<unsigned>(c >> 32)};
    return std::mt19937_64(seq);
  }

 private:
  std::uint64_t master_;
};

}  // namespace qspeckle
