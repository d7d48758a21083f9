#include "optimize.hpp"

#include <ceres/ceres.h>

#include <algorithm>
#include <cmath>

#include "dclogit/core.hpp"

namespace dclogit::detail {
namespace {

class CeresObjective final : public ceres::FirstOrderFunction {
public:
    CeresObjective(const Objective& f, int n) : f_(f), n_(n) {}

    bool Evaluate(const double* x, double* cost, double* gradient) const override {
        std::span<const double> xs(x, static_cast<std::size_t>(n_));
        std::span<double> gs;
        if (gradient != nullptr) {
            gs = std::span<double>(gradient, static_cast<std::size_t>(n_));
        }
        *cost = f_(xs, gs);
        return std::isfinite(*cost);
    }

    int NumParameters() const override { return n_; }

private:
    const Objective& f_;
    int n_;
};

double max_norm(std::span<const double> g) {
    double m = 0.0;
    for (double v : g) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace

MinimizeResult minimize(const Objective& objective, std::vector<double> start, const MinimizeSettings& settings) {
    MinimizeResult out;
    const int n = static_cast<int>(start.size());
    std::vector<double> grad(start.size());
    if (n == 0) {
        out.value = objective(start, grad);
        out.x = std::move(start);
        return out;
    }

    ceres::GradientProblem problem(new CeresObjective(objective, n));
    ceres::GradientProblemSolver::Options options;
    options.line_search_direction_type = ceres::BFGS;
    options.max_num_iterations = settings.max_iterations;
    options.gradient_tolerance = settings.gradient_tolerance;
    // Stop on the gradient criterion only.
    options.function_tolerance = 0.0;
    options.parameter_tolerance = 0.0;
    options.logging_type = ceres::SILENT;
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(options, problem, start.data(), &summary);

    out.value = objective(start, grad);
    out.gradient_norm = max_norm(grad);
    out.iterations = static_cast<int>(summary.iterations.size());
    out.report = summary.BriefReport();
    out.x = std::move(start);

    // A line search that stalls at the optimum is reported as a failure by
    // the solver; accept it when the gradient is already within a
    // modest multiple of the tolerance.
    if (out.gradient_norm > settings.gradient_tolerance * 100.0) {
        throw OptimizationError("quasi-Newton fit did not converge: |grad|_inf = " +
                                std::to_string(out.gradient_norm) + " after " +
                                std::to_string(out.iterations) + " iterations (" + out.report + ")");
    }
    return out;
}

}  // namespace dclogit::detail
