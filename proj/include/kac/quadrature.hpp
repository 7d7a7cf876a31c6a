#pragma once

#include <cstddef>
#include <vector>

namespace kac {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre rule on [-1,1]. Newton iteration on the Legendre recurrence.
QuadratureRule gauss_legendre(int n);

// Gauss-Legendre rule mapped to [a,b].
QuadratureRule gauss_legendre(int n, double a, double b);

// Gauss-Hermite rule: integral of e^{-u^2} f(u) du ~ sum w_i f(u_i).
QuadratureRule gauss_hermite(int n);

// Adaptive Simpson on [a,b] to absolute tolerance tol (test oracle helper).
double adaptive_simpson(double (*f)(double, const void*), const void* ctx,
                        double a, double b, double tol, int max_depth = 40);

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40) {
    struct Ctx { const F* fn; };
    Ctx ctx{&f};
    auto thunk = [](double x, const void* c) -> double {
        return (*static_cast<const Ctx*>(c)->fn)(x);
    };
    return adaptive_simpson(+thunk, &ctx, a, b, tol, max_depth);
}

} // namespace kac
