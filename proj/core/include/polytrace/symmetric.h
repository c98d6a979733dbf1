#pragma once

#include <span>

#include "polytrace/polynomial.h"

namespace polytrace {

/// Evaluates a symmetric polynomial f(v_1..v_p) when only the elementary
/// symmetric values e_k(v), k = 1..p, are known (e.g. e_k of the
/// eigenvalues of a matrix, read off its principal minors). Rewrites f in
/// e_1..e_p by leading-term elimination; exact over the rationals.
/// Throws Error if f is not symmetric in `vars`, contains umbrae, or
/// involves other indeterminates.
template <Scalar S>
S evaluate_symmetric(const Polynomial<S>& f, std::span<const Indeterminate> vars,
                     std::span<const S> esf_values);

}  // namespace polytrace
