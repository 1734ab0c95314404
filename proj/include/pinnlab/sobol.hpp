#pragma once

#include <array>
#include <vector>

namespace pinnlab {

/// First n points of the unscrambled 2-D Sobol sequence in Gray-code order
/// (canonical direction numbers: van der Corput in dimension 0, primitive
/// polynomial x+1 in dimension 1). skip_zero drops the all-zeros point and
/// starts the sequence at (0.5, 0.5).
std::vector<std::array<double, 2>> sobol_2d(int n, bool skip_zero = true);

}  // namespace pinnlab
