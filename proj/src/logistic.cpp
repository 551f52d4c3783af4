#include "defectsim/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace defectsim {

double sigmoid_clamped(double z) {
    z = std::clamp(z, -kLinearPredictorClamp, kLinearPredictorClamp);
    return 1.0 / (1.0 + std::exp(-z));
}

Standardizer fit_standardizer(const Matrix& X) {
    if (X.rows < 1) throw std::invalid_argument("standardizer: need at least one row");
    const std::size_t n = X.rows;
    const std::size_t d = X.cols;

    Standardizer s;
    s.means.assign(d, 0.0);
    s.sds.assign(d, 1.0);
    s.constant.assign(d, false);

    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += X(i, j);
        mean /= static_cast<double>(n);
        s.means[j] = mean;

        if (n == 1) {
            s.constant[j] = true;
            continue;
        }
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = X(i, j) - mean;
            ss += dx * dx;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd == 0.0) {
            s.constant[j] = true;
        } else {
            s.sds[j] = sd;
        }
    }
    return s;
}

std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> x) {
    if (x.size() != s.dimension())
        throw std::invalid_argument("standardizer: dimension mismatch");
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - s.means[j]) / s.sds[j];
    return z;
}

namespace {

double linear_predictor(std::span<const double> row, double intercept,
                        std::span<const double> beta) {
    double z = intercept;
    for (std::size_t j = 0; j < row.size(); ++j) z += beta[j] * row[j];
    return z;
}

// Gaussian elimination with partial pivoting; returns false on a singular
// system. A and b are clobbered.
bool solve_in_place(Matrix& A, std::vector<double>& b) {
    const std::size_t m = A.rows;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(A(r, col)) > std::abs(A(pivot, col))) pivot = r;
        if (A(pivot, col) == 0.0) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < m; ++c) std::swap(A(col, c), A(pivot, c));
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / A(col, col);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = A(r, col) * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) A(r, c) -= f * A(col, c);
            b[r] -= f * b[col];
        }
    }
    for (std::size_t col = m; col-- > 0;) {
        double v = b[col];
        for (std::size_t c = col + 1; c < m; ++c) v -= A(col, c) * b[c];
        b[col] = v / A(col, col);
    }
    return true;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

double logistic_objective(const Matrix& Z, const std::vector<bool>& y, double intercept,
                          std::span<const double> beta, double lambda) {
    const std::size_t n = Z.rows;
    double nll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = sigmoid_clamped(linear_predictor(Z.row(i), intercept, beta));
        nll += y[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    double penalty = 0.0;
    for (double b : beta) penalty += b * b;
    return nll / static_cast<double>(n) + 0.5 * lambda * penalty;
}

std::vector<double> logistic_gradient(const Matrix& Z, const std::vector<bool>& y,
                                      double intercept, std::span<const double> beta,
                                      double lambda) {
    const std::size_t n = Z.rows;
    const std::size_t d = Z.cols;
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = Z.row(i);
        const double p = sigmoid_clamped(linear_predictor(row, intercept, beta));
        const double r = p - (y[i] ? 1.0 : 0.0);
        g[0] += r;
        for (std::size_t j = 0; j < d; ++j) g[j + 1] += r * row[j];
    }
    for (double& v : g) v /= static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) g[j + 1] += lambda * beta[j];
    return g;
}

LogisticModel fit_logistic_ridge(const Matrix& Z, const std::vector<bool>& y, double lambda,
                                 int max_iter, double tol) {
    const std::size_t n = Z.rows;
    const std::size_t d = Z.cols;
    if (n < 2) throw std::invalid_argument("logistic fit: need at least two rows");
    if (y.size() != n) throw std::invalid_argument("logistic fit: label length mismatch");
    if (!(lambda > 0.0)) throw std::invalid_argument("logistic fit: lambda must be positive");

    std::size_t positives = 0;
    for (bool v : y) positives += v ? 1 : 0;
    if (positives == 0 || positives == n)
        throw std::invalid_argument("logistic fit: labels contain a single class");
    for (double v : Z.data)
        if (!std::isfinite(v)) throw std::invalid_argument("logistic fit: non-finite input");

    LogisticModel model;
    model.coefficients.assign(d, 0.0);
    model.ridge_lambda = lambda;

    double intercept = 0.0;
    std::vector<double> beta(d, 0.0);
    double objective = logistic_objective(Z, y, intercept, beta, lambda);

    for (int it = 0; it < max_iter; ++it) {
        const std::vector<double> g = logistic_gradient(Z, y, intercept, beta, lambda);
        if (inf_norm(g) <= tol) {
            model.converged = true;
            break;
        }

        // Ridge-augmented Hessian over the [1, Z] design.
        Matrix H(d + 1, d + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = Z.row(i);
            const double p = sigmoid_clamped(linear_predictor(row, intercept, beta));
            const double w = p * (1.0 - p);
            H(0, 0) += w;
            for (std::size_t j = 0; j < d; ++j) {
                const double wz = w * row[j];
                H(0, j + 1) += wz;
                for (std::size_t k = j; k < d; ++k) H(j + 1, k + 1) += wz * row[k];
            }
        }
        for (std::size_t r = 0; r < d + 1; ++r)
            for (std::size_t c = 0; c < r; ++c) H(r, c) = H(c, r);
        for (double& v : H.data) v /= static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) H(j + 1, j + 1) += lambda;

        std::vector<double> step(d + 1);
        for (std::size_t j = 0; j < d + 1; ++j) step[j] = -g[j];
        if (!solve_in_place(H, step)) break;

        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving) {
            const double cand_intercept = intercept + scale * step[0];
            std::vector<double> cand_beta(d);
            for (std::size_t j = 0; j < d; ++j) cand_beta[j] = beta[j] + scale * step[j + 1];
            const double cand_objective =
                logistic_objective(Z, y, cand_intercept, cand_beta, lambda);
            if (cand_objective <= objective) {
                intercept = cand_intercept;
                beta = std::move(cand_beta);
                objective = cand_objective;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break;
        model.iterations = it + 1;
    }

    if (!model.converged)
        model.converged = inf_norm(logistic_gradient(Z, y, intercept, beta, lambda)) <= tol;

    model.intercept = intercept;
    model.coefficients = std::move(beta);
    return model;
}

double predict_probability(const LogisticModel& model, const Standardizer& s,
                           std::span<const double> x) {
    if (x.size() != model.coefficients.size() || x.size() != s.dimension())
        throw std::invalid_argument("predict: dimension mismatch");
    const std::vector<double> z = apply_standardizer(s, x);
    return sigmoid_clamped(linear_predictor(z, model.intercept, model.coefficients));
}

}  // namespace defectsim
