#include "doiflow/rng.hpp"

#include <cmath>
#include <numbers>

namespace doiflow {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t CounterRng::next_u64() noexcept {
    ++counter_;
    return splitmix64_mix(seed_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::size_t CounterRng::uniform_index(std::size_t lo, std::size_t hi) noexcept {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::size_t>(next_u64() % span);
}

double CounterRng::normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex CounterRng::complex_normal() noexcept {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

CounterRng CounterRng::substream(std::uint64_t id) const noexcept {
    return CounterRng(splitmix64_mix(seed_ ^ splitmix64_mix(id + kGolden)));
}

ComplexMatrix random_complex_matrix(CounterRng& rng, std::size_t rows, std::size_t cols) {
    ComplexMatrix m(rows, cols);
    for (auto& z : m.entries()) z = rng.complex_normal();
    return m;
}

ComplexVector random_complex_vector(CounterRng& rng, std::size_t dim) {
    ComplexVector v(dim);
    for (auto& z : v) z = rng.complex_normal();
    return v;
}

HermitianMatrix random_hermitian(CounterRng& rng, std::size_t dim) {
    const ComplexMatrix g = random_complex_matrix(rng, dim, dim);
    return HermitianMatrix(0.5 * (g + g.adjoint()));
}

ComplexMatrix random_unitary(CounterRng& rng, std::size_t dim) {
    return orthonormalize_columns(random_complex_matrix(rng, dim, dim));
}

}  // namespace doiflow
