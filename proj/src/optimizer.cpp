#include "levycal/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace levycal {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Zero the components of a descent direction that would push an active
// (alpha_j == 0) rate negative.
void project_direction(std::span<const double> alpha, std::span<double> dir)
{
    for (std::size_t j = 0; j < dir.size(); ++j)
        if (alpha[j] <= 0.0 && dir[j] < 0.0)
            dir[j] = 0.0;
}

double projected_gradient_norm(std::span<const double> alpha, std::span<const double> grad_f)
{
    double s = 0.0;
    for (std::size_t j = 0; j < grad_f.size(); ++j) {
        if (alpha[j] <= 0.0 && grad_f[j] > 0.0)
            continue;
        s += grad_f[j] * grad_f[j];
    }
    return std::sqrt(s);
}

}  // namespace

ControlVector::ControlVector(std::vector<double> alpha) : alpha_(std::move(alpha))
{
    for (double a : alpha_)
        if (!(a >= 0.0) || !std::isfinite(a))
            throw std::invalid_argument("control vector: rates must be finite and nonnegative");
}

ObjectiveValue evaluate_reduced_objective(const CalibrationProblem& problem, std::span<const double> alpha)
{
    CCOperator cc(problem.grid, problem.coeffs);
    DensityHistory hist = solve_forward(problem.f0, alpha, problem.basis, cc, problem.time, problem.forward);
    return evaluate_objective(hist.terminal(), problem.samples, problem.eps);
}

std::vector<double> alpha_gradient(const DensityHistory& forward, const AdjointHistory& adjoint,
                                   const SplineBasis& basis)
{
    const std::size_t n = forward.n_space;
    if (adjoint.n_space != n || basis.n_space() != n)
        throw std::invalid_argument("alpha gradient: size mismatch");

    std::vector<std::size_t> support;
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            if (basis.sample(j, d) != 0.0) {
                support.push_back(d);
                break;
            }
        }
    }

    // corr[d] = sum over levels of weight * sum_i p_i f_{i-d}, inner = the
    // d-independent part weight * <p, f>.
    std::vector<double> corr(n, 0.0);
    double inner = 0.0;
    auto accumulate = [&](std::span<const double> p, std::span<const double> f, double weight) {
        inner += weight * dot(p, f);
        for (std::size_t d : support) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                s += p[i] * f[i + n - d];
            for (std::size_t i = d; i < n; ++i)
                s += p[i] * f[i - d];
            corr[d] += weight * s;
        }
    };

    for (std::size_t m = 1; m < forward.n_time; ++m)
        accumulate(adjoint.level(m), forward.level(m), 2.0 * forward.dt);
    const std::size_t K = forward.n_substeps();
    for (std::size_t s = 1; s <= K; ++s)
        accumulate(adjoint.substep(s), forward.substep(s - 1), forward.dt_substep);

    std::vector<double> grad(basis.size(), 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        double g = 0.0;
        for (std::size_t d : support)
            g += basis.sample(j, d) * (corr[d] - inner);
        grad[j] = -forward.h * g;
    }
    return grad;
}

GradientEvaluation reduced_gradient(const CalibrationProblem& problem, std::span<const double> alpha)
{
    CCOperator cc(problem.grid, problem.coeffs);
    JumpKernel kernel(alpha, problem.basis, problem.grid);
    DensityHistory hist = solve_forward(problem.f0, kernel, cc, problem.time, problem.forward);

    GradientEvaluation out;
    out.objective = evaluate_objective(hist.terminal(), problem.samples, problem.eps);
    std::vector<double> p_t = terminal_condition(hist.terminal(), problem.samples, problem.eps);
    AdjointHistory adj = solve_adjoint(p_t, kernel, cc, hist);
    out.gradient = alpha_gradient(hist, adj, problem.basis);
    out.diagnostics = hist.diagnostics;
    return out;
}

LineSearchResult armijo_linesearch(std::span<const double> x, double fx, std::span<const double> grad,
                                   std::span<const double> dir,
                                   const std::function<double(std::span<const double>)>& evaluator,
                                   const LineSearchOptions& options)
{
    if (!(options.delta > 0.0 && options.delta < 0.5))
        throw std::invalid_argument("armijo: delta must lie in (0, 1/2)");
    if (!(options.shrink > 0.0 && options.shrink < 1.0) || !(options.xi_init > 0.0))
        throw std::invalid_argument("armijo: need xi_init > 0 and shrink in (0,1)");

    LineSearchResult res;
    res.point.assign(x.begin(), x.end());
    res.value = fx;
    if (norm(dir) == 0.0) {
        res.zero_direction = true;
        res.accepted = true;
        return res;
    }

    const double slope = dot(grad, dir);
    std::vector<double> trial(x.size());
    double xi = options.xi_init;
    for (std::size_t n = 0; n <= options.max_shrinks; ++n, xi *= options.shrink) {
        for (std::size_t j = 0; j < x.size(); ++j)
            trial[j] = std::max(0.0, x[j] + xi * dir[j]);
        double ft = evaluator(trial);
        ++res.evaluations;
        if (std::isfinite(ft) && ft <= fx + options.delta * xi * slope) {
            res.step = xi;
            res.accepted = true;
            res.point = trial;
            res.value = ft;
            return res;
        }
    }
    return res;
}

double dai_yuan_beta(std::span<const double> g_next, std::span<const double> g, std::span<const double> d)
{
    if (g_next.size() != g.size() || g.size() != d.size())
        throw std::invalid_argument("dai-yuan: size mismatch");
    std::vector<double> y(g.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = g_next[i] - g[i];
    double num = dot(g_next, g_next);
    if (num == 0.0)
        return 0.0;
    double den = dot(d, y);
    if (std::abs(den) < 1e-14 * norm(d) * norm(y) || den == 0.0)
        return 0.0;
    return num / den;
}

FitReport calibrate(const CalibrationProblem& problem, const OptimizerOptions& options)
{
    const std::size_t n_theta = problem.basis.size();
    FitReport report;
    report.n_theta = n_theta;
    report.centers.assign(problem.basis.centers().begin(), problem.basis.centers().end());
    report.delta = problem.basis.delta();

    std::vector<double> alpha = options.alpha0.empty()
                                    ? std::vector<double>(n_theta, options.alpha0_fill)
                                    : options.alpha0;
    if (alpha.size() != n_theta)
        throw std::invalid_argument("calibrate: alpha0 size does not match the basis");
    ControlVector{alpha};  // validates feasibility of the start
    const std::size_t restart_every = options.restart_every ? options.restart_every : 10 * n_theta;

    auto eval_f = [&](std::span<const double> a) {
        try {
            return -evaluate_reduced_objective(problem, a).j_value;
        } catch (const StepSizeError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    GradientEvaluation ev;
    try {
        ev = reduced_gradient(problem, alpha);
    } catch (const std::exception& e) {
        report.alpha_star = alpha;
        report.status = std::string("initial evaluation failed: ") + e.what();
        return report;
    }

    auto to_grad_f = [](const std::vector<double>& grad_j) {
        std::vector<double> g(grad_j.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] = -grad_j[i];
        return g;
    };

    double f_val = -ev.objective.j_value;
    std::vector<double> g = to_grad_f(ev.gradient);
    std::vector<double> d(n_theta);
    for (std::size_t j = 0; j < n_theta; ++j)
        d[j] = -g[j];
    project_direction(alpha, d);

    std::size_t k = 0;
    std::size_t since_restart = 0;
    report.status = "iteration cap reached";
    while (true) {
        double pg = projected_gradient_norm(alpha, g);
        if (pg <= options.tol) {
            report.converged = true;
            report.status = "projected gradient below tolerance";
            break;
        }
        if (k >= options.k_max)
            break;

        bool steepest = since_restart == 0;
        if (dot(g, d) >= 0.0) {
            for (std::size_t j = 0; j < n_theta; ++j)
                d[j] = -g[j];
            project_direction(alpha, d);
            since_restart = 0;
            steepest = true;
        }

        LineSearchResult ls = armijo_linesearch(alpha, f_val, g, d, eval_f, options.line_search);
        if (!ls.accepted && !steepest) {
            for (std::size_t j = 0; j < n_theta; ++j)
                d[j] = -g[j];
            project_direction(alpha, d);
            since_restart = 0;
            ls = armijo_linesearch(alpha, f_val, g, d, eval_f, options.line_search);
        }
        if (ls.zero_direction) {
            report.converged = true;
            report.status = "search direction vanished";
            break;
        }
        if (!ls.accepted) {
            report.status = "line search failed along steepest descent";
            break;
        }

        alpha = ls.point;
        try {
            ev = reduced_gradient(problem, alpha);
        } catch (const std::exception& e) {
            report.status = std::string("gradient evaluation failed: ") + e.what();
            break;
        }
        std::vector<double> g_next = to_grad_f(ev.gradient);
        f_val = -ev.objective.j_value;

        ++since_restart;
        double beta = 0.0;
        if (since_restart < restart_every)
            beta = dai_yuan_beta(g_next, g, d);
        else
            since_restart = 0;
        if (beta <= 0.0)
            since_restart = 0;
        for (std::size_t j = 0; j < n_theta; ++j)
            d[j] = -g_next[j] + beta * d[j];
        project_direction(alpha, d);
        g = std::move(g_next);
        ++k;

        IterationRecord rec;
        rec.iteration = k;
        rec.j_value = -f_val;
        rec.gradient_norm = norm(g);
        rec.step = ls.step;
        rec.beta = beta;
        rec.evaluations = ls.evaluations;
        report.trace.push_back(rec);
    }

    report.alpha_star = alpha;
    report.iterations = k;
    report.j_star = ev.objective.j_value;
    report.aic = aic_score(report.j_star, problem.samples.size(), n_theta, options.penalty);

    auto& diag = report.diagnostics;
    diag.mass_drift = ev.diagnostics.mass_drift;
    diag.min_density = ev.diagnostics.min_density;
    diag.floored_count = ev.objective.floored_count;
    diag.gradient_norm = norm(g);
    diag.projected_gradient_norm = projected_gradient_norm(alpha, g);
    diag.dt_used = ev.diagnostics.dt_used;
    diag.dt_euler_pos = ev.diagnostics.bounds.dt_euler_pos;
    diag.dt_bdf2 = ev.diagnostics.bounds.dt_bdf2;
    diag.dt_bdf2_paper = ev.diagnostics.bounds.dt_bdf2_paper;
    diag.xi_check_min = ev.diagnostics.xi_check_min;
    diag.forced_step = ev.diagnostics.forced;

    CCOperator cc(problem.grid, problem.coeffs);
    DensityHistory hist = solve_forward(problem.f0, alpha, problem.basis, cc, problem.time,
                                        ForwardOptions{problem.forward.bootstrap_substeps,
                                                       problem.forward.xi, true});
    report.terminal_density.assign(hist.terminal().begin(), hist.terminal().end());
    return report;
}

SweepResult aic_sweep(const std::function<CalibrationProblem(std::size_t)>& problem_for,
                      std::span<const std::size_t> n_theta_list, const OptimizerOptions& options)
{
    SweepResult out;
    std::optional<double> best;
    for (std::size_t n_theta : n_theta_list) {
        try {
            CalibrationProblem problem = problem_for(n_theta);
            OptimizerOptions opt = options;
            if (opt.alpha0.size() != n_theta)
                opt.alpha0.clear();
            FitReport rep = calibrate(problem, opt);
            if (rep.status.rfind("initial evaluation failed", 0) == 0) {
                out.failures.push_back("n_theta=" + std::to_string(n_theta) + ": " + rep.status);
                continue;
            }
            if (!best || rep.aic > *best) {
                best = rep.aic;
                out.selected_n_theta = n_theta;
            }
            out.reports.push_back(std::move(rep));
        } catch (const std::exception& e) {
            out.failures.push_back("n_theta=" + std::to_string(n_theta) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace levycal
