// Selberg zeta of the modular group by both routes, and its first zero on Re s = 1/2.
#include <cstdio>

#include <hecke/hecke.hpp>

int main() {
    using namespace hecke;
    auto G = hecke_group_q(3);
    auto chi = trivial_rep(G);
    for (double s : {2.0, 3.0}) {
        auto e = euler_product(G, chi, s);
        cplx f = selberg_zeta(G, chi, s);
        std::printf("s = %.1f  euler %.12f (%ld classes)  fredholm %.12f\n", s, e.value.real(), e.classes,
                    f.real());
    }
    ZeroOptions o;
    o.nx = o.ny = 1;
    for (auto& z : find_zeros(G, chi, {0.45, 0.55, 9.4, 9.6}, o).zeros)
        std::printf("zero %.12f%+.12fi  stability %.1e\n", z.s.real(), z.s.imag(), z.stability);
}
