// Theta group: Z(s) on the real axis by both routes, and the lambda -> 2 limit of the slow operator.
#include <cstdio>

#include <hecke/hecke.hpp>

int main() {
    using namespace hecke;
    auto G = hecke_group_lambda(2);
    auto chi = trivial_rep(G);
    for (double s : {1.5, 2.0, 3.0}) {
        cplx f = selberg_zeta(G, chi, s);
        auto e = euler_product(G, chi, s);
        std::printf("s = %.1f  fredholm %.12f  euler %.12f (bound %.1e)\n", s, f.real(), e.value.real(), e.bound);
    }
    auto T = convergence_study(2.0, [](const HeckeGroup& g) { return trivial_rep(g); }, {2.1, 2.01, 2.001});
    for (auto& r : T.rows) std::printf("lambda = %.4f  ||M(lambda) - M(2)|| = %.3e\n", r.lambda, r.norm);
}
