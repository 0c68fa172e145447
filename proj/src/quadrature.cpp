#include "phi4/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <string>

#include "phi4/errors.hpp"

namespace phi4::quad {
namespace {

double call_fn(double x, void* params) {
  return (*static_cast<const std::function<double(double)>*>(params))(x);
}

struct HandlerGuard {
  gsl_error_handler_t* prev;
  HandlerGuard() : prev(gsl_set_error_handler_off()) {}
  ~HandlerGuard() { gsl_set_error_handler(prev); }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rtol) {
  HandlerGuard guard;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4096);
  gsl_function gf;
  gf.function = call_fn;
  gf.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, abserr = 0.0;
  int status = gsl_integration_qag(&gf, a, b, 0.0, rtol, 4096,
                                   GSL_INTEG_GAUSS31, ws, &result, &abserr);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS)
    throw QuadratureNotConverged("qag status " + std::to_string(status) +
                                 " on [" + std::to_string(a) + "," +
                                 std::to_string(b) + "]");
  return result;
}

}  // namespace phi4::quad
