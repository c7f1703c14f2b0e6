#pragma once

#include <cstddef>
#include <vector>

#include "cflow/geom_core.hpp"

namespace cflow::detail {

// Support samples of the polar body K* on the grid of h.
std::vector<double> polar_support_samples(const SupportFn& h, std::size_t oversample = 8);

}  // namespace cflow::detail
