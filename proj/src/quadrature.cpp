#include "doiflow/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "doiflow/errors.hpp"

namespace doiflow {

Quadrature gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw InvalidInput("Gauss-Legendre rule needs at least one node");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        dp = n == 1 ? 1.0 : static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[i] = mid - half * x;
        q.nodes[n - 1 - i] = mid + half * x;
        q.weights[i] = q.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) q.nodes[n / 2] = mid;
    return q;
}

Quadrature composite_gauss_legendre(double a, double b, std::size_t panels, std::size_t nodes_per_panel) {
    if (panels == 0) throw InvalidInput("composite rule needs at least one panel");
    const Quadrature base = gauss_legendre(nodes_per_panel);
    Quadrature q;
    q.nodes.reserve(panels * nodes_per_panel);
    q.weights.reserve(panels * nodes_per_panel);
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * static_cast<double>(p);
        for (std::size_t k = 0; k < base.size(); ++k) {
            q.nodes.push_back(lo + 0.5 * width * (base.nodes[k] + 1.0));
            q.weights.push_back(0.5 * width * base.weights[k]);
        }
    }
    return q;
}

}  // namespace doiflow
