#include "unbias/rng.hpp"

#include "unbias/gauss.hpp"

namespace unbias::rng {

double normal(std::uint64_t seed, Domain domain, std::uint64_t a, std::uint64_t b,
              std::uint64_t c) {
    return gauss::ppf(u01(cell_key(seed, domain, a, b, c)));
}

} // namespace unbias::rng
