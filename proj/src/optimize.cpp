#include "optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <memory>

namespace cflow::detail {
namespace {

double trampoline(const gsl_vector* v, void* params) {
  const auto* f = static_cast<const std::function<double(double, double)>*>(params);
  return (*f)(gsl_vector_get(v, 0), gsl_vector_get(v, 1));
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

MinimizeResult nelder_mead_2d(const std::function<double(double, double)>& f,
                              std::array<double, 2> start, std::array<double, 2> step,
                              double size_tolerance, int max_iterations) {
  gsl_set_error_handler_off();
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(2));
  std::unique_ptr<gsl_vector, VectorDeleter> ss(gsl_vector_alloc(2));
  gsl_vector_set(x.get(), 0, start[0]);
  gsl_vector_set(x.get(), 1, start[1]);
  gsl_vector_set(ss.get(), 0, step[0]);
  gsl_vector_set(ss.get(), 1, step[1]);

  gsl_multimin_function fn;
  fn.n = 2;
  fn.f = &trampoline;
  fn.params = const_cast<std::function<double(double, double)>*>(&f);

  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2));
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), ss.get());

  MinimizeResult r;
  int status = GSL_CONTINUE;
  while (status == GSL_CONTINUE && r.iterations < max_iterations) {
    ++r.iterations;
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), size_tolerance);
  }
  r.converged = status == GSL_SUCCESS;
  r.x = {gsl_vector_get(m->x, 0), gsl_vector_get(m->x, 1)};
  r.value = m->fval;
  return r;
}

}  // namespace cflow::detail
