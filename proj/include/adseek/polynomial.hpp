#pragma once

#include <complex>
#include <span>
#include <vector>

namespace adseek {

using cplx = std::complex<double>;

/// Horner evaluation; coefficients in ascending order (c[0] + c[1] z + ...).
cplx poly_eval(std::span<const cplx> coeffs, cplx z);

/// All roots of a complex polynomial (ascending coefficients, non-zero
/// leading term) by Laguerre iteration with deflation, each root polished
/// against the undeflated polynomial.
std::vector<cplx> poly_roots(std::span<const cplx> coeffs);

}  // namespace adseek
