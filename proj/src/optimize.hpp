#pragma once

#include <array>
#include <functional>

namespace cflow::detail {

struct MinimizeResult {
  std::array<double, 2> x{};
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead on a function of two variables (GSL nmsimplex2).
MinimizeResult nelder_mead_2d(const std::function<double(double, double)>& f,
                              std::array<double, 2> start, std::array<double, 2> step,
                              double size_tolerance, int max_iterations);

}  // namespace cflow::detail
