#pragma once

#include <cstddef>
#include <vector>

namespace doiflow {

/// Nodes and weights of a one-dimensional rule; integrates by sum w_k f(x_k).
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    template <class F>
    auto integrate(F&& f) const {
        decltype(f(0.0)) sum{};
        for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(nodes[k]);
        return sum;
    }
};

/// n-point Gauss-Legendre rule on [a, b] (Newton iteration on P_n).
Quadrature gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// `panels` equal panels on [a, b], each with an n-point Gauss-Legendre rule.
Quadrature composite_gauss_legendre(double a, double b, std::size_t panels, std::size_t nodes_per_panel);

}  // namespace doiflow
