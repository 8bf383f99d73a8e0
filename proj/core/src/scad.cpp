#include "ivsel/scad.hpp"

#include "ivsel/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ivsel {

double scad_penalty(double t, double lambda, double a) {
    t = std::abs(t);
    if (t <= lambda) return lambda * t;
    if (t <= a * lambda) return (2.0 * a * lambda * t - t * t - lambda * lambda) / (2.0 * (a - 1.0));
    return 0.5 * (a + 1.0) * lambda * lambda;
}

double scad_objective(const DesignData& data, const Vector& theta, double lambda, double a) {
    const double n = static_cast<double>(data.n());
    double value = 0.5 * (data.y - data.X * theta).squaredNorm() / n;
    for (Index j = 0; j < theta.size(); ++j) value += scad_penalty(theta[j], lambda, a);
    return value;
}

double scad_threshold(double z, double v, double lambda, double a) {
    const double mag = std::abs(z);
    auto f = [&](double t) { return 0.5 * v * t * t - mag * t + scad_penalty(t, lambda, a); };

    // Stationary points of each quadratic piece, clamped into the piece, plus
    // the knots. On a concave middle piece the knots carry the minimum.
    std::array<double, 6> candidates{
        0.0,
        lambda,
        a * lambda,
        std::clamp((mag - lambda) / v, 0.0, lambda),
        a * lambda,
        std::max(mag / v, a * lambda),
    };
    const double curvature = v - 1.0 / (a - 1.0);
    if (curvature > 0.0) candidates[4] = std::clamp((mag - a * lambda / (a - 1.0)) / curvature, lambda, a * lambda);

    double best = 0.0;
    double best_value = f(0.0);
    for (double t : candidates) {
        const double value = f(t);
        if (value < best_value) {
            best_value = value;
            best = t;
        }
    }
    return std::copysign(best, z);
}

ScadResult scad_initializer(const DesignData& data, const ScadOptions& options) {
    require(options.lambda > 0.0, ErrorKind::InvalidArgument, "lambda_scad must be > 0");
    require(options.a > 2.0, ErrorKind::InvalidArgument, "SCAD concavity a must be > 2");
    require(data.X.rows() == data.n(), ErrorKind::DimensionMismatch, "X rows differ from y length");

    const Index p = data.p();
    const double n = static_cast<double>(data.n());
    Vector col_scale(p);
    for (Index j = 0; j < p; ++j) col_scale[j] = data.X.col(j).squaredNorm() / n;

    ScadResult result;
    result.theta = Vector::Zero(p);
    Vector residual = data.y;

    for (int pass = 1; pass <= options.max_passes; ++pass) {
        double max_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            if (col_scale[j] == 0.0) continue;
            const double old = result.theta[j];
            const double z = data.X.col(j).dot(residual) / n + col_scale[j] * old;
            const double updated = scad_threshold(z, col_scale[j], options.lambda, options.a);
            if (updated != old) {
                residual -= (updated - old) * data.X.col(j);
                result.theta[j] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        result.passes = pass;
        const double scale = 1.0 + result.theta.cwiseAbs().maxCoeff();
        if (max_change <= options.tolerance * scale) {
            result.converged = true;
            break;
        }
    }

    // Each coordinate step is an exact univariate minimization, so the objective
    // never increases and the last iterate is the best one seen.
    result.objective = scad_objective(data, result.theta, options.lambda, options.a);
    return result;
}

}  // namespace ivsel
