#include "ispd/rng.hpp"

#include "ispd/specfun.hpp"

namespace ispd {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t w0, std::uint64_t w1,
                            std::uint64_t w2, std::uint64_t w3) {
    std::uint64_t s = w0;
    std::uint64_t mix = splitmix64(s);
    s ^= w1 * 0x9e3779b97f4a7c15ULL;
    const std::uint64_t m1 = splitmix64(s);
    s ^= w2 * 0xc2b2ae3d27d4eb4fULL;
    const std::uint64_t m2 = splitmix64(s);
    s ^= w3 * 0x165667b19e3779f9ULL;
    const std::uint64_t m3 = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(mix),
                      static_cast<std::uint32_t>(mix >> 32),
                      static_cast<std::uint32_t>(m1),
                      static_cast<std::uint32_t>(m1 >> 32),
                      static_cast<std::uint32_t>(m2),
                      static_cast<std::uint32_t>(m2 >> 32),
                      static_cast<std::uint32_t>(m3),
                      static_cast<std::uint32_t>(m3 >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed)
    : eng_(make_engine(seed, 0, 0, 0)) {}

RngStream RngStream::substream(std::uint64_t master, std::uint64_t a,
                               std::uint64_t b, std::uint64_t c) {
    RngStream s(0);
    s.eng_ = make_engine(master, a + 1, b + 1, c + 1);
    return s;
}

double RngStream::uniform_open() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform_open();
}

double RngStream::normal() { return specfun::norm_quantile(uniform_open()); }

}  // namespace ispd
