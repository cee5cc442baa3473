#pragma once

#include "fpsi/biot_stokes.hpp"
#include "fpsi/plate_stokes.hpp"
#include "fpsi/spectral.hpp"

#include <Eigen/Dense>

namespace oracle {

Eigen::MatrixXd dense(const fpsi::CsrMatrix& m);

// Dense step matrices built from the weak forms with separately coded bases and quadrature.
// Only the mesh geometry and the DOF numbering are taken from the problem.
Eigen::MatrixXd plate_step_matrix(const fpsi::PlateStokesProblem& p, double dt);
Eigen::MatrixXd biot_step_matrix(const fpsi::BiotStokesProblem& p, double dt);

// Mode pencil with basis derivatives by central differences and Boole's rule per cell.
struct Pencil {
    Eigen::MatrixXcd A, M;
};
Pencil mode_pencil(double k1, double k2, const fpsi::SpectralConfig& cfg);

// Poiseuille channel with the plate frozen and [q] = -p on the interface. Relative nodal errors
// of one step started from the interpolated exact state.
struct PatchErrors {
    double velocity = 0.0;
    double pressure = 0.0;
    double filtration = 0.0;  // max |u.n - v| on the interface
};
PatchErrors poiseuille_patch(int nx, int ny, double dt = 1e-3);

// max |a - b| over entries, scaled per row by max(1, largest |b| in that row)
double max_entry_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double max_entry_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// 5-point Gauss rule on [0, 1]
extern const double gauss5_x[5];
extern const double gauss5_w[5];

}  // namespace oracle
