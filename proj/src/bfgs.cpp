#include "rotaprec/bfgs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace rotaprec {

namespace {

std::size_t argmin4(const std::array<double, 4>& v) {
    std::size_t m = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (v[i] < v[m]) m = i;
    return m;
}

}  // namespace

LineSearchResult golden_section_search(const ObjectiveFn& f, const Vector& x, const Vector& d,
                                       double f_x, const LineSearchConfig& cfg) {
    LineSearchResult out;
    out.f_alpha = f_x;
    if (d.size() == 0 || d.squaredNorm() == 0.0) return out;

    auto probe = [&](double alpha) {
        ++out.evaluations;
        return f(x - alpha * d);
    };

    std::array<double, 4> a{0.0, 0.0, 0.0, cfg.alpha_init};
    std::array<double, 4> fv{f_x, 0.0, 0.0, probe(cfg.alpha_init)};

    auto keep_expanding = [&] {
        if (!(a[3] < cfg.alpha_cap)) return false;
        return cfg.bracket == BracketMode::Verbatim ? fv[0] < fv[3] : fv[3] < fv[0];
    };
    while (keep_expanding()) {
        a[3] *= cfg.expand;
        fv[3] = probe(a[3]);
        ++out.expansions;
    }
    out.final_bracket = a[3];

    a[1] = cfg.lower_ratio * a[3];
    a[2] = cfg.upper_ratio * a[3];
    fv[1] = probe(a[1]);
    fv[2] = probe(a[2]);

    auto spread = [&] { return *std::max_element(fv.begin(), fv.end()) - *std::min_element(fv.begin(), fv.end()); };

    while (a[3] - a[0] > cfg.eps_alpha && spread() > cfg.eps_f) {
        const std::size_t m = argmin4(fv);
        const std::size_t lo = m == 0 ? 0 : m - 1;
        const std::size_t hi = std::min<std::size_t>(3, m + 1);
        const std::array<double, 4> old_a = a;
        const std::array<double, 4> old_f = fv;

        // Shrink to the neighbourhood of the best point, carrying the end
        // values along with the end points.
        a[0] = a[lo];
        a[3] = a[hi];
        fv[0] = old_f[lo];
        fv[3] = old_f[hi];
        const double width = a[3] - a[0];
        a[1] = a[0] + cfg.lower_ratio * width;
        a[2] = a[0] + cfg.upper_ratio * width;
        // A reused interior point keeps its own abscissa, so every tracked
        // value is the objective at its tracked alpha.
        if (m == 1) {
            a[2] = old_a[1];
            fv[2] = old_f[1];
            fv[1] = probe(a[1]);
        } else if (m == 2) {
            a[1] = old_a[2];
            fv[1] = old_f[2];
            fv[2] = probe(a[2]);
        } else {
            fv[1] = probe(a[1]);
            fv[2] = probe(a[2]);
        }
    }

    const std::size_t best = argmin4(fv);
    if (fv[best] < f_x) {
        out.alpha = a[best];
        out.f_alpha = fv[best];
    }
    return out;
}

Vector numeric_gradient(const ObjectiveFn& f, const Vector& x, double f_x, double step) {
    Vector g(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + step;
        const double fi = f(probe);
        probe(i) = x(i);
        if (!std::isfinite(fi)) {
            std::ostringstream os;
            os << "numeric_gradient: non-finite objective at coordinate " << i;
            throw NumericalError(os.str());
        }
        g(i) = (fi - f_x) / step;
    }
    return g;
}

bool curvature_ok(const Vector& dx, const Vector& dg) {
    const double curv = dg.dot(dx);
    return curv > 1e-12 * dg.norm() * dx.norm() && curv > 0.0;
}

Matrix bfgs_update(const Matrix& m, const Vector& dx, const Vector& dg) {
    if (!curvature_ok(dx, dg)) return m;
    const auto n = dx.size();
    const double rho = 1.0 / dg.dot(dx);
    const Matrix left = Matrix::Identity(n, n) - rho * dx * dg.transpose();
    Matrix next = left * m * left.transpose() + rho * dx * dx.transpose();
    return 0.5 * (next + next.transpose());
}

BfgsResult bfgs_minimize(const ObjectiveFn& f, Vector x0, const BfgsConfig& cfg,
                         const IterationObserver& observer) {
    BfgsResult r;
    const auto n = x0.size();
    long evaluations = 0;
    const ObjectiveFn counted = [&](const Vector& x) {
        ++evaluations;
        return f(x);
    };

    r.x = std::move(x0);
    r.f = counted(r.x);
    if (!std::isfinite(r.f)) throw NumericalError("bfgs_minimize: non-finite objective at the start point");
    r.gradient = n > 0 ? numeric_gradient(counted, r.x, r.f, cfg.grad_step) : Vector();
    r.inv_hessian = Matrix::Identity(n, n);
    r.history.push_back({0, r.f, 0.0, r.gradient.norm(), false, false});
    if (observer) observer(r.history.back(), r.x, r.inv_hessian);

    if (n == 0) {
        r.converged = true;
        r.evaluations = evaluations;
        return r;
    }

    for (int k = 0; k < cfg.max_iters; ++k) {
        Vector d = r.inv_hessian * r.gradient;
        LineSearchResult ls = golden_section_search(counted, r.x, d, r.f, cfg.line_search);
        bool reset = false;
        if (ls.alpha == 0.0 && !r.inv_hessian.isIdentity(0.0)) {
            // No progress along the quasi-Newton direction: restart from steepest descent.
            r.inv_hessian = Matrix::Identity(n, n);
            d = r.gradient;
            ls = golden_section_search(counted, r.x, d, r.f, cfg.line_search);
            reset = true;
        }
        Vector x_next = r.x - ls.alpha * d;
        const double f_next = counted(x_next);
        if (!std::isfinite(f_next)) throw NumericalError("bfgs_minimize: non-finite objective after step");
        Vector g_next = numeric_gradient(counted, x_next, f_next, cfg.grad_step);

        const Vector dx = x_next - r.x;
        const Vector dg = g_next - r.gradient;
        const bool skipped = !curvature_ok(dx, dg);
        r.inv_hessian = bfgs_update(r.inv_hessian, dx, dg);

        const double f_prev = r.f;
        r.x = std::move(x_next);
        r.f = f_next;
        r.gradient = std::move(g_next);
        r.iterations = k + 1;
        r.history.push_back({k + 1, r.f, ls.alpha, r.gradient.norm(), skipped, reset});
        if (observer) observer(r.history.back(), r.x, r.inv_hessian);

        if (std::abs(f_next - f_prev) < cfg.f_tolerance) {
            r.converged = true;
            break;
        }
    }
    r.evaluations = evaluations;
    return r;
}

}  // namespace rotaprec
