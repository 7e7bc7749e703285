#ifndef ISPD_RNG_HPP
#define ISPD_RNG_HPP

#include <cstdint>
#include <random>

namespace ispd {

// Deterministic random stream with cheap derivation of independent
// substreams from (master seed, index words). Normal draws go through the
// inverse-CDF so that results are identical on every standards-conforming
// platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    static RngStream substream(std::uint64_t master, std::uint64_t a,
                               std::uint64_t b = 0, std::uint64_t c = 0);

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on the open interval (0, 1); safe to feed into quantiles.
    double uniform_open();

    double uniform(double lo, double hi);

    // Standard normal via norm_quantile(uniform_open()).
    double normal();

private:
    std::mt19937_64 eng_;
};

}  // namespace ispd

#endif
