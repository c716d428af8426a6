#pragma once

// Counter-based 64-bit generator (SplitMix64 finalizer applied to
// seed + k * 0x9E3779B97F4A7C15). Output k depends only on (seed, k), so
// streams are reproducible in any language. Test vectors for seed 0:
//   0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F
// Doubles take the top 53 bits; normals use Box-Muller on consecutive pairs.

#include <cstddef>
#include <cstdint>

#include "doiflow/matrix.hpp"

namespace doiflow {

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [lo, hi].
    std::size_t uniform_index(std::size_t lo, std::size_t hi) noexcept;
    double normal() noexcept;
    Complex complex_normal() noexcept;

    /// Independent stream keyed by `id`; does not advance this generator.
    [[nodiscard]] CounterRng substream(std::uint64_t id) const noexcept;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

ComplexMatrix random_complex_matrix(CounterRng& rng, std::size_t rows, std::size_t cols);
ComplexVector random_complex_vector(CounterRng& rng, std::size_t dim);
/// (G + G^dagger)/2 with G complex Gaussian.
HermitianMatrix random_hermitian(CounterRng& rng, std::size_t dim);
/// Modified Gram-Schmidt on a complex Gaussian matrix.
ComplexMatrix random_unitary(CounterRng& rng, std::size_t dim);

}  // namespace doiflow
