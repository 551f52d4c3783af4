#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "defectsim/matrix.hpp"

namespace defectsim {

// Per-column centering and scaling. Zero-variance columns get sd 1 and a
// constant flag so downstream fits stay finite.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> sds;
    std::vector<bool> constant;

    std::size_t dimension() const { return means.size(); }
};

struct LogisticModel {
    double intercept = 0.0;
    std::vector<double> coefficients;  // on the standardized scale
    double ridge_lambda = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Linear predictors are clamped to this range inside the sigmoid so the
// objective and probabilities stay finite under separation.
inline constexpr double kLinearPredictorClamp = 30.0;

double sigmoid_clamped(double z);

Standardizer fit_standardizer(const Matrix& X);
std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> x);

// Ridge-penalized negative mean log-likelihood:
//   J(b) = (1/n) sum_i [-y_i log p_i - (1-y_i) log(1-p_i)] + (lambda/2) |b_1..d|^2
// with p_i = sigmoid(clamp(b_0 + z_i . b)). The intercept is not penalized.
double logistic_objective(const Matrix& Z, const std::vector<bool>& y, double intercept,
                          std::span<const double> beta, double lambda);

// Gradient of J; element 0 is the intercept component.
std::vector<double> logistic_gradient(const Matrix& Z, const std::vector<bool>& y,
                                      double intercept, std::span<const double> beta,
                                      double lambda);

// IRLS (Newton with the ridge-augmented Hessian) with step halving whenever a
// step fails to decrease J. Stops when the gradient infinity norm falls to
// tol or max_iter is reached; non-convergence is reported via the flag, not
// an error. Throws std::invalid_argument for single-class labels, non-finite
// input, or lambda <= 0.
LogisticModel fit_logistic_ridge(const Matrix& Z, const std::vector<bool>& y, double lambda,
                                 int max_iter = 50, double tol = 1e-8);

double predict_probability(const LogisticModel& model, const Standardizer& s,
                           std::span<const double> x);

// Positive (defective) at p >= cutoff.
inline bool decide(double p, double cutoff) { return p >= cutoff; }

}  // namespace defectsim
