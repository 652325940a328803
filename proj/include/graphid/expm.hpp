#pragma once

#include "graphid/graph.hpp"

namespace graphid {

/// Matrix exponential by scaling and squaring with diagonal Padé
/// approximants of degree 3, 5, 7, 9 or 13 (Higham's 1-norm thresholds).
Matrix expm(const Matrix& m);

/// Fréchet derivative of the matrix exponential at `m` in direction `e`:
/// the upper-right block of expm([[m, e], [0, m]]).
Matrix expm_frechet(const Matrix& m, const Matrix& e);

}  // namespace graphid
