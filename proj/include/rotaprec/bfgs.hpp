#pragma once

// Quasi-Newton minimization with a forward-difference gradient, the BFGS
// inverse-Hessian recursion and a golden-section line search along x - a*d.

#include "rotaprec/types.hpp"

#include <functional>
#include <vector>

namespace rotaprec {

using ObjectiveFn = std::function<double(const Vector&)>;

enum class BracketMode {
    // Expand while alpha4 < cap and f(x) < f(x - alpha4 d).
    Verbatim,
    // Expand while alpha4 < cap and the far end still improves on f(x).
    Descent,
};

struct LineSearchConfig {
    double eps_f = 1e-4;       // function-value spread tolerance
    double eps_alpha = 5e-4;   // bracket width tolerance
    double expand = 3.0;
    double lower_ratio = 0.382;
    double upper_ratio = 0.618;
    double alpha_init = 0.1;
    double alpha_cap = 20.0;
    BracketMode bracket = BracketMode::Verbatim;
};

struct LineSearchResult {
    double alpha = 0.0;
    double f_alpha = 0.0;  // tracked value at alpha
    int evaluations = 0;
    int expansions = 0;
    double final_bracket = 0.0;  // alpha4 after bracketing
};

// Four-point golden-section search over alpha in [0, alpha4]. Returns
// alpha = 0 unless some tracked point is strictly better than f(x).
LineSearchResult golden_section_search(const ObjectiveFn& f, const Vector& x, const Vector& d,
                                       double f_x, const LineSearchConfig& cfg = {});

// g_i = (f(x + h e_i) - f(x)) / h; exactly x.size() evaluations of f.
// Throws NumericalError naming the coordinate if a probe is non-finite.
Vector numeric_gradient(const ObjectiveFn& f, const Vector& x, double f_x, double step = 1e-4);

// Rank-two BFGS update of the inverse Hessian. Returns m unchanged when the
// curvature dg^T dx is not safely positive (<= 1e-12 |dg| |dx|).
Matrix bfgs_update(const Matrix& m, const Vector& dx, const Vector& dg);

bool curvature_ok(const Vector& dx, const Vector& dg);

struct BfgsConfig {
    double grad_step = 1e-4;     // eps1
    double f_tolerance = 1e-4;   // eps2, stop when |f_{k+1} - f_k| < eps2
    int max_iters = 500;
    LineSearchConfig line_search;
};

struct BfgsIteration {
    int k = 0;
    double f = 0.0;
    double alpha = 0.0;
    double grad_norm = 0.0;
    bool update_skipped = false;
    bool hessian_reset = false;  // direction fell back to the gradient
};

struct BfgsResult {
    Vector x;
    double f = 0.0;
    Matrix inv_hessian;
    Vector gradient;
    int iterations = 0;
    bool converged = false;
    long evaluations = 0;
    std::vector<BfgsIteration> history;  // entry 0 is the starting point
};

using IterationObserver = std::function<void(const BfgsIteration&, const Vector& x, const Matrix& m)>;

BfgsResult bfgs_minimize(const ObjectiveFn& f, Vector x0, const BfgsConfig& cfg = {},
                         const IterationObserver& observer = {});

}  // namespace rotaprec
