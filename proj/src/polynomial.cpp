#include "adseek/polynomial.hpp"

#include <cmath>
#include <limits>

#include "adseek/errors.hpp"

namespace adseek {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kCycleBreak = 10;
constexpr int kMaxIter = 80 * kCycleBreak;

// Laguerre iteration for one root of `a` (ascending), starting from x.
cplx laguerre(std::span<const cplx> a, cplx x) {
    static constexpr double frac[] = {0.0, 0.5, 0.25, 0.75, 0.13, 0.38, 0.62, 0.88, 1.0};
    const int m = static_cast<int>(a.size()) - 1;
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        cplx b = a[static_cast<std::size_t>(m)];
        double err = std::abs(b);
        cplx d = 0.0, f = 0.0;
        const double abx = std::abs(x);
        for (int j = m - 1; j >= 0; --j) {
            f = x * f + d;
            d = x * d + b;
            b = x * b + a[static_cast<std::size_t>(j)];
            err = std::abs(b) + abx * err;
        }
        err *= kEps;
        if (std::abs(b) <= err) {
            return x;
        }
        const cplx g = d / b;
        const cplx g2 = g * g;
        const cplx h = g2 - 2.0 * f / b;
        const cplx sq = std::sqrt(static_cast<double>(m - 1) * (static_cast<double>(m) * h - g2));
        cplx gp = g + sq;
        const cplx gm = g - sq;
        if (std::abs(gp) < std::abs(gm)) {
            gp = gm;
        }
        const cplx dx = std::abs(gp) > 0.0
                            ? static_cast<double>(m) / gp
                            : std::polar(1.0 + abx, static_cast<double>(iter));
        const cplx x1 = x - dx;
        if (x1 == x) {
            return x;
        }
        if (iter % kCycleBreak != 0) {
            x = x1;
        } else {
            x -= frac[(iter / kCycleBreak) % 9] * dx;
        }
    }
    return x;
}

}  // namespace

cplx poly_eval(std::span<const cplx> coeffs, cplx z) {
    cplx acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * z + *it;
    }
    return acc;
}

std::vector<cplx> poly_roots(std::span<const cplx> coeffs) {
    if (coeffs.size() < 2 || coeffs.back() == cplx(0.0)) {
        throw InvalidArgument("poly_roots: need degree >= 1 with non-zero leading coefficient");
    }
    const int degree = static_cast<int>(coeffs.size()) - 1;
    std::vector<cplx> work(coeffs.begin(), coeffs.end());
    std::vector<cplx> roots;
    roots.reserve(static_cast<std::size_t>(degree));

    for (int j = degree; j >= 1; --j) {
        std::span<const cplx> active(work.data(), static_cast<std::size_t>(j) + 1);
        cplx x = laguerre(active, cplx(0.0));
        if (std::abs(x.imag()) <= 2.0 * kEps * std::abs(x.real())) {
            x = cplx(x.real(), 0.0);
        }
        roots.push_back(x);
        // synthetic division by (z - x)
        cplx b = work[static_cast<std::size_t>(j)];
        for (int jj = j - 1; jj >= 0; --jj) {
            const cplx c = work[static_cast<std::size_t>(jj)];
            work[static_cast<std::size_t>(jj)] = b;
            b = x * b + c;
        }
        work.resize(static_cast<std::size_t>(j));
    }
    for (auto& r : roots) {
        r = laguerre(coeffs, r);
    }
    return roots;
}

}  // namespace adseek
