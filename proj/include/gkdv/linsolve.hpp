#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gkdv/grid.hpp"

namespace gkdv {

/// Dense n x n operator with optional linear constraint rows. Each constraint
/// is an L2 functional: (solution, field) = target, evaluated with the grid's
/// quadrature weights.
struct LinearSystem {
    Eigen::MatrixXd op;
    std::vector<Field> constraint_fields;
    std::vector<double> constraint_targets;
    Field rhs;

    LinearSystem(Eigen::MatrixXd op_, Field rhs_)
        : op(std::move(op_)), rhs(std::move(rhs_)) {}

    void add_constraint(Field functional, double target) {
        constraint_fields.push_back(std::move(functional));
        constraint_targets.push_back(target);
    }
};

struct ConstrainedSolution {
    Field solution;
    double residual;                         // ||op x - rhs|| / ||rhs||
    std::vector<double> constraint_residuals;
};

/// Quadrature weights of the grid (trapezoid or rectangle rule) as a vector.
Eigen::VectorXd quadrature_weights(const Grid1D& grid);

/// KKT least-squares solve: minimize ||op x - rhs||_2 subject to the
/// constraint rows. Throws if the constraint rows are linearly dependent
/// (Gram-matrix rank check) or the relative residual exceeds rel_tol.
ConstrainedSolution solve_constrained(const LinearSystem& sys, double rel_tol = 1e-8);

}  // namespace gkdv
