#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace fpsi {

using cplx = std::complex<double>;

struct SpectralConfig {
    double eps1 = 1.0;
    double eps2 = 1.0;
    double gamma_p = 1.0;
    double beta = 1.0;
    int k_max = 4;
    int nz = 32;
    double cutoff = 1e9;         // |lambda| above this is treated as infinite
    double residual_tol = 1e-8;  // pairs above this are reported, not accepted
};

void validate(const SpectralConfig& cfg);

// Unknowns: w, v, [q], qbar, then u1, u2, u3 (P2 on (-1, 0), clamped at z = -1), then pi (P1).
struct PencilLayout {
    int nz = 0;
    int w = 0, v = 1, qjump = 2, qbar = 3;
    int u1 = 4, u2 = 0, u3 = 0, pi = 0;
    int n_vel = 0;  // free P2 nodes per component
    int n_pres = 0;
    int dimension = 0;

    explicit PencilLayout(int nz = 4);
    int top(int component_offset) const { return component_offset + n_vel - 1; }  // node at z = 0
};

// Eigenvalues lambda of A x = lambda M x are those of -A_k (the generator with a minus sign).
struct ModePencil {
    double k1 = 0.0;
    double k2 = 0.0;
    SpectralConfig config;
    PencilLayout layout;
    Eigen::MatrixXcd A;
    Eigen::MatrixXcd M;
    Eigen::MatrixXcd fluid_dissipation;  // viscous plus slip form on the velocity block
};

ModePencil assemble_mode_pencil(double k1, double k2, const SpectralConfig& cfg);

struct EigenPair {
    cplx lambda;
    Eigen::VectorXcd vector;
    double residual = 0.0;  // ||A x - lambda M x|| / ||x||
};

// Finite generalized eigenpairs of (A, M), sorted by decreasing real part. Throws SolverError.
std::vector<EigenPair> generalized_eigenpairs(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& M, double cutoff = 1e9);
std::vector<EigenPair> mode_eigenvalues(const ModePencil& pencil, double cutoff = 1e9);

struct EnergyTerms {
    cplx rate;         // lambda-weighted kinetic and storage norms
    cplx potential;    // conj(lambda) (|k|^4 + gamma) |w|^2
    double dissipation = 0.0;
};
EnergyTerms eigen_energy_terms(const ModePencil& pencil, cplx lambda, const Eigen::VectorXcd& x);
// |Re(identity)| / (sum of term magnitudes). Throws ValidationError for a zero vector.
double eigen_energy_residual(const ModePencil& pencil, const EigenPair& pair);

struct ModeRow {
    int n1 = 0, n2 = 0;  // k = 2 pi (n1, n2)
    int finite_count = 0;
    double max_real = 0.0;
    double max_residual = 0.0;
    double max_energy_residual = 0.0;
};

struct SpectrumEntry {
    double k1 = 0.0, k2 = 0.0;
    cplx lambda;
    double residual = 0.0;
};

struct SpectralResult {
    double mu0_estimate = 0.0;
    std::vector<ModeRow> modes;
    std::vector<SpectrumEntry> spectrum;
    double max_residual = 0.0;
    double max_energy_residual = 0.0;
};

SpectralResult spectral_abscissa(const SpectralConfig& cfg);

// Caveat printed above spectrum tables.
std::string spectral_caveat();

}  // namespace fpsi
