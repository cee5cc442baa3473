#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "fpsi/spectral.hpp"

#include "fpsi/error.hpp"
#include "fpsi/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace fpsi {

void validate(const SpectralConfig& cfg) {
    if (!(cfg.eps1 > 0)) throw ValidationError("eps1 must be positive");
    if (!(cfg.eps2 > 0)) throw ValidationError("eps2 must be positive");
    if (!(cfg.gamma_p >= 0)) throw ValidationError("gamma_p must be non-negative");
    if (!(cfg.beta >= 0)) throw ValidationError("beta must be non-negative");
    if (cfg.k_max < 0) throw ValidationError("k_max must be non-negative");
    if (cfg.nz < 4) throw ValidationError("nz must be at least 4");
    if (!(cfg.cutoff > 0)) throw ValidationError("cutoff must be positive");
}

PencilLayout::PencilLayout(int nz_) : nz(nz_) {
    n_vel = 2 * nz;
    n_pres = nz + 1;
    u1 = 4;
    u2 = u1 + n_vel;
    u3 = u2 + n_vel;
    pi = u3 + n_vel;
    dimension = pi + n_pres;
}

namespace {

struct P2Local {
    double N[3];
    double dN[3];  // d/dz
};

P2Local p2_at(double s, double h) {
    return {{(1 - s) * (1 - 2 * s), 4 * s * (1 - s), s * (2 * s - 1)}, {(4 * s - 3) / h, (4 - 8 * s) / h, (4 * s - 1) / h}};
}

}  // namespace

ModePencil assemble_mode_pencil(double k1, double k2, const SpectralConfig& cfg) {
    validate(cfg);
    const PencilLayout L(cfg.nz);
    const int n = L.dimension;
    const cplx I(0, 1);
    const double kk = k1 * k1 + k2 * k2;
    const double k4 = kk * kk;
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);

    M(L.w, L.w) = M(L.v, L.v) = M(L.qjump, L.qjump) = M(L.qbar, L.qbar) = 1.0;
    K(L.w, L.v) = -1.0;
    K(L.v, L.w) = k4 + cfg.gamma_p;
    K(L.v, L.v) = cfg.eps1 * k4;
    K(L.v, L.qjump) = 1.0 - kk / 12.0;
    K(L.qjump, L.v) = kk - 12.0;
    K(L.qjump, L.qjump) = cfg.eps2 * kk + 48.0;
    K(L.qjump, L.qbar) = 72.0;
    K(L.qbar, L.qjump) = 6.0;
    K(L.qbar, L.qbar) = 12.0;

    const int comp[3] = {L.u1, L.u2, L.u3};
    const double h = 1.0 / cfg.nz;
    const auto rule = gauss_legendre(4);
    // D_a applied to a real basis function with value N and z-derivative dN
    auto D = [&](int a, double N, double dN) -> cplx {
        if (a == 0) return I * k1 * N;
        if (a == 1) return I * k2 * N;
        return dN;
    };
    for (int e = 0; e < cfg.nz; ++e) {
        int vel[3];
        for (int a = 0; a < 3; ++a) vel[a] = 2 * e + a - 1;  // -1 marks the clamped node
        const int pre[2] = {e, e + 1};
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const double s = rule.points[q][0];
            const double wq = rule.weights[q] * h;
            const auto b = p2_at(s, h);
            const double P[2] = {1 - s, s};
            for (int i = 0; i < 3; ++i) {
                if (vel[i] < 0) continue;
                for (int j = 0; j < 3; ++j) {
                    if (vel[j] < 0) continue;
                    const double mass = wq * b.N[i] * b.N[j];
                    const double lap = wq * (kk * b.N[i] * b.N[j] + b.dN[i] * b.dN[j]);
                    for (int d = 0; d < 3; ++d) {
                        const int r = comp[d] + vel[i];
                        M(r, comp[d] + vel[j]) += mass;
                        K(r, comp[d] + vel[j]) += lap;
                        for (int c = 0; c < 3; ++c)
                            K(r, comp[c] + vel[j]) += wq * D(d, b.N[j], b.dN[j]) * std::conj(D(c, b.N[i], b.dN[i]));
                    }
                }
                for (int j = 0; j < 2; ++j)
                    for (int d = 0; d < 3; ++d) {
                        const cplx div_test = std::conj(D(d, b.N[i], b.dN[i]));
                        K(comp[d] + vel[i], L.pi + pre[j]) += -wq * P[j] * div_test;
                        K(L.pi + pre[j], comp[d] + vel[i]) += -wq * D(d, b.N[i], b.dN[i]) * P[j];
                    }
            }
        }
    }
    K(L.top(L.u1), L.top(L.u1)) += cfg.beta;
    K(L.top(L.u2), L.top(L.u2)) += cfg.beta;
    K(L.top(L.u3), L.qjump) += -1.0;
    K(L.qjump, L.top(L.u3)) += 12.0;

    ModePencil p{k1, k2, cfg, L, -K, M, K.block(L.u1, L.u1, 3 * L.n_vel, 3 * L.n_vel)};
    return p;
}

std::vector<EigenPair> generalized_eigenpairs(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& M, double cutoff) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || M.rows() != n || M.cols() != n) throw ValidationError("pencil matrices must be square and equal in size");
    Eigen::MatrixXcd a = A, b = M;
    Eigen::VectorXcd alpha(n), beta(n);
    Eigen::MatrixXcd vl(1, 1), vr(n, n);
    const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, b.data(), n, alpha.data(), beta.data(),
                                          vl.data(), 1, vr.data(), n);
    if (info != 0) throw SolverError("zggev failed with info " + std::to_string(info), 0.0);
    std::vector<EigenPair> out;
    for (int i = 0; i < n; ++i) {
        if (std::abs(beta(i)) == 0.0) continue;
        const cplx lambda = alpha(i) / beta(i);
        if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) || std::abs(lambda) > cutoff) continue;
        EigenPair p;
        p.lambda = lambda;
        p.vector = vr.col(i);
        const double nrm = p.vector.norm();
        if (nrm > 0) p.vector /= nrm;
        p.residual = (A * p.vector - lambda * (M * p.vector)).norm();
        out.push_back(std::move(p));
    }
    std::stable_sort(out.begin(), out.end(), [](const EigenPair& x, const EigenPair& y) {
        if (x.lambda.real() != y.lambda.real()) return x.lambda.real() > y.lambda.real();
        return x.lambda.imag() < y.lambda.imag();
    });
    return out;
}

std::vector<EigenPair> mode_eigenvalues(const ModePencil& pencil, double cutoff) {
    return generalized_eigenpairs(pencil.A, pencil.M, cutoff);
}

EnergyTerms eigen_energy_terms(const ModePencil& p, cplx lambda, const Eigen::VectorXcd& x) {
    const auto& L = p.layout;
    const double kk = p.k1 * p.k1 + p.k2 * p.k2;
    const double k4 = kk * kk;
    const auto& c = p.config;
    const cplx w = x(L.w), v = x(L.v), qj = x(L.qjump), qb = x(L.qbar);
    const auto u = x.segment(L.u1, 3 * L.n_vel);
    const auto Mu = p.M.block(L.u1, L.u1, 3 * L.n_vel, 3 * L.n_vel);
    const double kin = std::norm(v) + std::norm(qj) / 12.0 + std::norm(qb) + u.dot(Mu * u).real();
    EnergyTerms t;
    t.rate = lambda * kin;
    t.potential = std::conj(lambda) * (k4 + c.gamma_p) * std::norm(w);
    t.dissipation = c.eps1 * k4 * std::norm(v) + c.eps2 * kk / 12.0 * std::norm(qj) + std::norm(qj) + 12.0 * std::norm(qb + 0.5 * qj) +
                    u.dot(p.fluid_dissipation * u).real();
    return t;
}

double eigen_energy_residual(const ModePencil& pencil, const EigenPair& pair) {
    if (pair.vector.size() != pencil.layout.dimension) throw ValidationError("eigenvector does not match the pencil");
    if (pair.vector.norm() == 0.0) throw ValidationError("eigenvector must be nonzero");
    const auto t = eigen_energy_terms(pencil, pair.lambda, pair.vector);
    const double total = (t.rate + t.potential).real() + t.dissipation;
    const double scale = std::abs(t.rate) + std::abs(t.potential) + std::abs(t.dissipation);
    return scale > 0 ? std::abs(total) / scale : 0.0;
}

SpectralResult spectral_abscissa(const SpectralConfig& cfg) {
    validate(cfg);
    std::vector<std::pair<int, int>> modes;
    for (int n1 = -cfg.k_max; n1 <= cfg.k_max; ++n1)
        for (int n2 = -cfg.k_max; n2 <= cfg.k_max; ++n2) modes.emplace_back(n1, n2);

    struct ModeOut {
        ModeRow row;
        std::vector<SpectrumEntry> entries;
    };
    std::vector<ModeOut> outs(modes.size());
    auto work = [&](std::size_t i) {
        const auto [n1, n2] = modes[i];
        const double k1 = 2 * std::numbers::pi * n1, k2 = 2 * std::numbers::pi * n2;
        const auto pencil = assemble_mode_pencil(k1, k2, cfg);
        const auto pairs = mode_eigenvalues(pencil, cfg.cutoff);
        auto& o = outs[i];
        o.row.n1 = n1;
        o.row.n2 = n2;
        o.row.finite_count = static_cast<int>(pairs.size());
        o.row.max_real = pairs.empty() ? -std::numeric_limits<double>::infinity() : pairs.front().lambda.real();
        for (const auto& p : pairs) {
            o.row.max_residual = std::max(o.row.max_residual, p.residual);
            o.row.max_energy_residual = std::max(o.row.max_energy_residual, eigen_energy_residual(pencil, p));
            o.entries.push_back({k1, k2, p.lambda, p.residual});
        }
    };
    const int nthreads = std::max(1, std::min<int>(assembly_threads(), static_cast<int>(modes.size())));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < modes.size(); ++i) work(i);
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < modes.size(); i += nthreads) work(i);
            });
    }

    SpectralResult r;
    double s = -std::numeric_limits<double>::infinity();
    for (auto& o : outs) {
        s = std::max(s, o.row.max_real);
        r.max_residual = std::max(r.max_residual, o.row.max_residual);
        r.max_energy_residual = std::max(r.max_energy_residual, o.row.max_energy_residual);
        r.modes.push_back(o.row);
        r.spectrum.insert(r.spectrum.end(), o.entries.begin(), o.entries.end());
    }
    r.mu0_estimate = -s;
    return r;
}

std::string spectral_caveat() {
    return "discrete per-mode spectra of the regularized operator; a finite truncation cannot exclude continuous essential spectrum";
}

}  // namespace fpsi
