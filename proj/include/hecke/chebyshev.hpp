#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace hecke {

// Chebyshev points of the first kind (interior) or second kind (Lobatto, with endpoints).
enum class NodeKind { gauss, lobatto };

// Lagrange interpolation at Chebyshev points on [-1,1].
class ChebyshevBasis {
public:
    explicit ChebyshevBasis(int n, NodeKind kind = NodeKind::gauss)
        : n_(n), kind_(n < 2 ? NodeKind::gauss : kind), nodes_(n), weights_(n) {
        for (int p = 0; p < n; ++p) {
            double sg = p % 2 ? -1.0 : 1.0;
            if (kind_ == NodeKind::gauss) {
                double th = (2 * p + 1) * std::numbers::pi / (2.0 * n);
                nodes_[p] = std::cos(th);
                weights_[p] = sg * std::sin(th);
            } else {
                nodes_[p] = std::cos(p * std::numbers::pi / (n - 1));
                weights_[p] = sg * (p == 0 || p == n - 1 ? 0.5 : 1.0);
            }
        }
    }

    int size() const { return n_; }
    const std::vector<double>& nodes() const { return nodes_; }

    // All cardinal functions at u; out must hold size() entries.
    template <class T>
    void cardinals(T u, T* out) const {
        T denom = 0;
        for (int p = 0; p < n_; ++p) {
            T diff = u - nodes_[p];
            if (diff == T(0)) {
                for (int q = 0; q < n_; ++q) out[q] = q == p ? T(1) : T(0);
                return;
            }
            out[p] = weights_[p] / diff;
            denom += out[p];
        }
        for (int p = 0; p < n_; ++p) out[p] /= denom;
    }

    template <class T>
    std::vector<T> cardinals(T u) const {
        std::vector<T> v(n_);
        cardinals(u, v.data());
        return v;
    }

    // Interpolant through values at the nodes.
    template <class T, class V>
    V interpolate(const std::vector<V>& values, T u) const {
        std::vector<T> l(n_);
        cardinals(u, l.data());
        V r = V(0);
        for (int p = 0; p < n_; ++p) r += values[p] * l[p];
        return r;
    }

    // Taylor coefficients c[q][k] = l_q^(k)(t)/k!, k = 0..kmax, via Chebyshev expansion
    // l_q = sum_m a_qm T_m and the differentiated three-term recurrence.
    std::vector<std::vector<double>> taylor(double t, int kmax) const {
        std::vector<std::vector<double>> u(n_, std::vector<double>(kmax + 1, 0.0));
        u[0][0] = 1;
        if (n_ > 1) {
            u[1][0] = t;
            if (kmax >= 1) u[1][1] = 1;
        }
        for (int m = 1; m + 1 < n_; ++m)
            for (int k = 0; k <= kmax; ++k)
                u[m + 1][k] = 2 * t * u[m][k] + (k ? 2 * u[m][k - 1] : 0.0) - u[m - 1][k];
        std::vector<std::vector<double>> c(n_, std::vector<double>(kmax + 1, 0.0));
        for (int q = 0; q < n_; ++q) {
            for (int m = 0; m < n_; ++m) {
                double a;
                if (kind_ == NodeKind::gauss) {
                    double th = (2 * q + 1) * std::numbers::pi / (2.0 * n_);
                    a = (m == 0 ? 1.0 : 2.0) / n_ * std::cos(m * th);
                } else {
                    auto end = [&](int i) { return i == 0 || i == n_ - 1 ? 0.5 : 1.0; };
                    a = 2.0 / (n_ - 1) * end(q) * end(m) * std::cos(m * q * std::numbers::pi / (n_ - 1));
                }
                for (int k = 0; k <= kmax; ++k) c[q][k] += a * u[m][k];
            }
        }
        return c;
    }

private:
    int n_;
    NodeKind kind_;
    std::vector<double> nodes_, weights_;
};

}  // namespace hecke
