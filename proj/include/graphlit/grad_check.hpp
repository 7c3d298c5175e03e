#pragma once
// Central finite-difference verification of tape gradients. Runs in double;
// h = 1e-5 per coordinate.

#include <cmath>
#include <functional>
#include <vector>

#include "graphlit/tensor.hpp"

namespace graphlit {

struct GradCheckReport {
    // Relative errors use a floored denominator (see below), so a coordinate
    // with a near-zero gradient is judged absolutely and the single pass
    // condition is max_rel_error <= rel_tol.
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    size_t coords_checked = 0;
    bool passed(double rel_tol) const { return max_rel_error <= rel_tol; }
};

// f maps a flat input vector to a scalar loss; analytic gradients come from a
// fresh tape per evaluation. The relative error for a coordinate uses a floor
// of abs_tol/rel_tol so that near-zero gradients are judged absolutely (the
// finite-difference noise floor is ~1e-10).
inline GradCheckReport grad_check(
    const std::function<double(const std::vector<double>&, std::vector<double>*)>& f,
    std::vector<double> x, double h = 1e-5, double rel_tol = 1e-6, double abs_tol = 1e-9) {
    std::vector<double> analytic(x.size(), 0.0);
    f(x, &analytic);
    GradCheckReport rep;
    double floor = abs_tol / rel_tol;
    for (size_t i = 0; i < x.size(); ++i) {
        double keep = x[i];
        x[i] = keep + h;
        double fp = f(x, nullptr);
        x[i] = keep - h;
        double fm = f(x, nullptr);
        x[i] = keep;
        double fd = (fp - fm) / (2.0 * h);
        double abs_err = std::fabs(fd - analytic[i]);
        double denom = std::max({std::fabs(fd), std::fabs(analytic[i]), floor});
        double rel_err = abs_err / denom;
        rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
        rep.max_rel_error = std::max(rep.max_rel_error, rel_err);
        ++rep.coords_checked;
    }
    return rep;
}

}  // namespace graphlit
