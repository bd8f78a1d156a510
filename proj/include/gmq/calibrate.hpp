#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmq/distribution.hpp"
#include "gmq/simulator.hpp"

namespace gmq {

enum class ObjectiveKind { MaxLambda, MaxExpectation, MinExpectation };

std::string objective_name(ObjectiveKind kind);
ObjectiveKind objective_from_name(const std::string& name);

struct OptimizerConfig {
    int restarts = 20;
    int max_iters_per_layer = 500; // Nelder-Mead cap is max_iters_per_layer * p
    double tol = 1e-8;             // simplex value-spread convergence
    PhaseFunction phase_fn;
    // Best parameters at depth p-1; padded with a zero layer and used as one
    // of the starts, which makes the optimized value non-decreasing in p.
    std::optional<CircuitParams> warm_start;
};

struct OptimizationResult {
    CircuitParams best_params;
    double best_value = 0.0; // the chosen metric at best_params
    ObjectiveKind objective_kind = ObjectiveKind::MaxLambda;
    int restarts_used = 0;
    std::int64_t evaluations = 0;
    std::vector<double> trace; // per-restart best values
    StateMetrics best_metrics;
};

// Multi-start Nelder-Mead over the 2p circuit parameters. Deterministic per
// (dist, p, objective, config, seed); restart r draws its own seed stream, so
// results do not depend on evaluation order. p = 0 returns the uniform-state
// metrics without searching.
OptimizationResult optimize_parameters(const ObjectiveDistribution& dist, int p,
                                       ObjectiveKind objective, const OptimizerConfig& config = {},
                                       std::uint64_t seed = 0);

struct LogLinearFit {
    double slope = 0.0;     // theta1
    double intercept = 0.0; // theta2
    double r2 = 0.0;
};

// Ordinary least squares on (n, log rho) points; needs >= 2 distinct n.
LogLinearFit fit_log_linear(std::span<const std::pair<double, double>> points);

enum class ModelVariant { Lambda, MuFull, MuFixed };

std::string variant_name(ModelVariant variant);
ModelVariant variant_from_name(const std::string& name);

struct RegressionModel {
    ModelVariant variant = ModelVariant::Lambda;
    std::vector<double> theta; // Lambda: 2; MuFull: 5; MuFixed: 3 (theta3 pinned)
    double rmse = 0.0;
    double r2 = 0.0;
    std::string training; // descriptor of the training set
    int iterations = 0;
    bool converged = false;
};

struct MuSample {
    double n = 0.0;
    double r = 0.0;
    double mu = 0.0;
};

// Wraps fit_log_linear into a Lambda-variant model.
RegressionModel fit_lambda_model(std::span<const std::pair<double, double>> n_log_rho,
                                 std::string training = {});

// Nonlinear least squares (damped Gauss-Newton, numeric Jacobian) for the
// mu surface. The grid must cover >= 3 distinct n and >= 5 distinct r;
// MuFixed pins theta3 to the supplied mu1. Throws FitError (with the last
// iterate and rmse) on non-convergence.
RegressionModel fit_mu_model(std::span<const MuSample> samples, ModelVariant variant,
                             std::optional<double> mu1 = std::nullopt, std::string training = {});

// Model surface value at (n, r); natural log throughout.
double mu_model_eval(const RegressionModel& model, double n, double r);

// min((2p+1)^2 * e^(theta1 n + theta2), 1).
double predict_lambda_ub(const RegressionModel& model, double n, int p);

// min(mu_hat(n, 1/(2p+1)^2), 1).
double predict_alpha_ub(const RegressionModel& model, double n, int p);

} // namespace gmq
