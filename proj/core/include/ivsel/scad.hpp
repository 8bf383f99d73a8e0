#pragma once

#include "ivsel/types.hpp"

namespace ivsel {

struct ScadOptions {
    double lambda = 1.0;
    double a = 3.7;
    double tolerance = 1e-6;
    int max_passes = 1000;
};

struct ScadResult {
    Vector theta;
    double objective = 0.0;
    int passes = 0;
    bool converged = false;  ///< false: best iterate returned after max_passes
};

/// SCAD(t; lambda, a) for t >= 0.
double scad_penalty(double t, double lambda, double a);

/// (1/2n) ||y - X theta||^2 + sum_j SCAD(|theta_j|).
double scad_objective(const DesignData& data, const Vector& theta, double lambda, double a);

/// Global minimizer over t of (v/2) t^2 - z t + SCAD(|t|). With v = 1 this is
/// the usual three-segment SCAD thresholding rule.
double scad_threshold(double z, double v, double lambda, double a);

/// Penalized least squares by cyclic coordinate descent from theta = 0.
/// Stops once the largest coordinate change falls below
/// tolerance * (1 + max |theta_j|).
ScadResult scad_initializer(const DesignData& data, const ScadOptions& options = {});

}  // namespace ivsel
