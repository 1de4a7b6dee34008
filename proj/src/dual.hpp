#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace impulse_games::detail {

/// Forward-mode dual number carrying N partial derivatives. Enough surface
/// for the threshold residuals (arithmetic and exp).
template <int N>
struct Dual {
    double v = 0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: implicit by design
    static Dual seed(double value, int slot) {
        Dual x(value);
        x.d[slot] = 1.0;
        return x;
    }

    Dual operator-() const {
        Dual out(-v);
        for (int i = 0; i < N; ++i) out.d[i] = -d[i];
        return out;
    }
    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual out(a.v * b.v);
        for (int i = 0; i < N; ++i) out.d[i] = a.d[i] * b.v + a.v * b.d[i];
        return out;
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        Dual out(a.v / b.v);
        const double inv2 = 1.0 / (b.v * b.v);
        for (int i = 0; i < N; ++i) out.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
        return out;
    }
};

template <int N>
Dual<N> exp(const Dual<N>& x) {
    Dual<N> out(std::exp(x.v));
    for (int i = 0; i < N; ++i) out.d[i] = out.v * x.d[i];
    return out;
}

} // namespace impulse_games::detail
