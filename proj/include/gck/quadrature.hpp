#pragma once

#include <functional>
#include <vector>

namespace gck {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

using Integrand = std::function<double(double)>;

// Single 21-point Gauss-Kronrod panel on [a, b].
QuadResult gauss_kronrod21(const Integrand& f, double a, double b);

// Globally adaptive bisection driven by the GK21 error estimate.  Stops when
// the summed error is below max(abs_tol, rel_tol*|I|) or after max_panels.
QuadResult integrate(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                     int max_panels = 500);

// Wynn's epsilon algorithm applied to a sequence of partial sums.  Returns the
// extrapolated limit; err receives the difference between the last two
// diagonal estimates.
double wynn_epsilon(const std::vector<double>& partial_sums, double& err);

}  // namespace gck
