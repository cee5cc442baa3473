#include "fpsi/biot_stokes.hpp"
#include "fpsi/diagnostics.hpp"
#include "fpsi/error.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fpsi;

namespace {

double max_abs(std::span<const double> v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST(Biot, StepMatrixMatchesOracleOnTwoCellMeshes) {
    const BiotStokesProblem p(PhysicalParams{}, 1, 1, 1, {10.0, 5.0});
    for (double dt : {1e-4, 5e-5}) {
        EXPECT_LE(oracle::max_entry_error(oracle::dense(p.step_matrix(dt)), oracle::biot_step_matrix(p, dt)), 1e-12);
    }
}

TEST(Biot, StepMatrixMatchesOracleRandomParams) {
    std::mt19937 rng(505);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        PhysicalParams params;
        params.fluid.mu_f *= u(rng);
        params.fluid.beta *= u(rng);
        params.biot.lambda_b *= u(rng);
        params.biot.mu_b *= u(rng);
        params.biot.kappa *= u(rng);
        params.biot.alpha = 0.5 * u(rng);
        params.biot.gamma *= u(rng);
        params.geometry.H *= u(rng);
        const int nx = 1 + trial % 3;
        const BiotStokesProblem p(params, nx, 1 + trial % 2, 2, {5.0 * u(rng), params.geometry.L / nx});
        const double dt = 1e-4 * u(rng);
        EXPECT_LE(oracle::max_entry_error(oracle::dense(p.step_matrix(dt)), oracle::biot_step_matrix(p, dt)), 1e-12);
    }
}

TEST(Biot, HomogeneousStepIsZero) {
    PhysicalParams params;
    params.pulse.p_max = 0.0;
    const BiotStokesProblem p(params, 4, 2, 2, {});
    const auto sys = p.assemble_step_system_biot(p.zero_state(), 1e-4, 1e-4);
    EXPECT_EQ(max_abs(sys.rhs), 0.0);
    auto s = p.zero_state();
    for (int n = 1; n <= 4; ++n) s = p.advance_biot(s, 1e-4, n * 1e-4);
    EXPECT_EQ(max_abs(s.u), 0.0);
    EXPECT_EQ(max_abs(s.eta), 0.0);
    EXPECT_EQ(max_abs(s.q), 0.0);
}

TEST(Biot, ReconstructionIdentityExact) {
    const BiotStokesProblem p(PhysicalParams{}, 6, 2, 2, {10.0, 5.0 / 6});
    auto s = p.bump_state(0.02);
    for (int n = 1; n <= 5; ++n) {
        const auto next = p.advance_biot(s, 1e-4, n * 1e-4);
        for (std::size_t i = 0; i < s.eta.size(); ++i) EXPECT_EQ(next.eta[i], s.eta[i] + 1e-4 * next.xi[i]);
        s = next;
    }
}

TEST(Biot, NoVolumePressureCouplingWithoutAlpha) {
    PhysicalParams params;
    params.biot.alpha = 0.0;
    const BiotStokesProblem p(params, 3, 2, 3, {});
    const auto m = p.step_matrix(1e-4);
    const auto& lay = p.layout();
    const int ox = lay["xi"].offset, oq = lay["q"].offset, nq = lay["q"].size;
    const int nb = p.solid_dofs().n_dofs;
    for (int r = 0; r < lay["xi"].size; ++r) {
        if (p.solid_dofs().coords[r % nb].y == 0.0) continue;  // interface rows carry the exchange terms
        for (int k = m.row_offsets()[ox + r]; k < m.row_offsets()[ox + r + 1]; ++k) {
            const int c = m.col_indices()[k];
            if (c >= oq && c < oq + nq) EXPECT_EQ(m.values()[k], 0.0);
        }
    }
    const BiotStokesProblem coupled(PhysicalParams{}, 3, 2, 3, {});
    const auto mc = coupled.step_matrix(1e-4);
    int hits = 0;
    for (int r = 0; r < lay["xi"].size; ++r)
        for (int k = mc.row_offsets()[ox + r]; k < mc.row_offsets()[ox + r + 1]; ++k)
            if (mc.col_indices()[k] >= oq && mc.values()[k] != 0.0) ++hits;
    EXPECT_GT(hits, 0);
}

TEST(Biot, VolumeBlocksSymmetricAndCouplingTransposed) {
    const BiotStokesProblem p(PhysicalParams{}, 4, 2, 3, {});
    const auto& o = p.operators();
    for (const CsrMatrix* m : {&o.solid_mass, &o.solid_strain, &o.solid_divdiv, &o.pore_mass, &o.pore_stiffness, &o.slip, &o.penalty}) {
        const auto d = oracle::dense(*m);
        EXPECT_LE((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff()));
    }
    const auto ex = oracle::dense(o.exchange);
    EXPECT_LE((ex + ex.transpose()).cwiseAbs().maxCoeff(), 1e-15);

    const auto full = oracle::dense(p.step_matrix(1e-4));
    const auto& lay = p.layout();
    const int ox = lay["xi"].offset, nx_ = lay["xi"].size, oq = lay["q"].offset, nq = lay["q"].size;
    const Eigen::MatrixXd pen = oracle::dense(o.penalty);
    const Eigen::MatrixXd xq = full.block(ox, oq, nx_, nq) - ex.block(ox, oq, nx_, nq);
    const Eigen::MatrixXd qx = full.block(oq, ox, nq, nx_) - ex.block(oq, ox, nq, nx_);
    double worst = 0;
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < nq; ++j) {
            if (p.constraints().contains(ox + i) || p.constraints().contains(oq + j)) continue;
            const double pen_xq = (p.nitsche().penalty / p.nitsche().h) * pen(ox + i, oq + j);
            const double pen_qx = (p.nitsche().penalty / p.nitsche().h) * pen(oq + j, ox + i);
            worst = std::max(worst, std::abs((xq(i, j) - pen_xq) + (qx(j, i) - pen_qx)));
        }
    EXPECT_LE(worst, 1e-12);
}

TEST(Biot, MidsurfaceDisplacement) {
    const BiotStokesProblem p(PhysicalParams{}, 8, 2, 4, {});
    for (double v : p.midsurface_displacement(p.zero_state())) EXPECT_EQ(v, 0.0);
    const double L = p.params().geometry.L;
    auto s = p.zero_state();
    const int nb = p.solid_dofs().n_dofs;
    for (int d = 0; d < nb; ++d) {
        const double x = p.solid_dofs().coords[d].x;
        s.eta[nb + d] = x * (L - x) / (L * L);
    }
    const auto prof = p.midsurface_displacement(s);
    const auto& gv = p.gamma_mesh().vertices;
    ASSERT_EQ(prof.size(), gv.size());
    for (std::size_t i = 0; i < gv.size(); ++i) EXPECT_NEAR(prof[i], gv[i] * (L - gv[i]) / (L * L), 1e-14);
}

TEST(Biot, ZeroForcingEnergyNonIncreasing) {
    PhysicalParams params;
    params.pulse.p_max = 0.0;
    const BiotStokesProblem p(params, 10, 3, 3, {10.0, 0.5});
    auto s = p.bump_state(0.05);
    double prev = energy_budget(p, s).total();
    ASSERT_GT(prev, 0.0);
    for (int n = 1; n <= 30; ++n) {
        s = p.advance_biot(s, 1e-4, n * 1e-4);
        const double now = energy_budget(p, s).total();
        EXPECT_LE(now, prev * (1 + 1e-12)) << "step " << n;
        prev = now;
    }
}

TEST(Biot, DrainedTopHeld) {
    PhysicalParams params;
    params.q_plus = 0.0;
    const BiotStokesProblem p(params, 6, 2, 2, {});
    auto s = p.zero_state();
    for (int n = 1; n <= 10; ++n) s = p.advance_biot(s, 1e-4, n * 1e-4);
    for (const auto& [d, _] : p.pore_dofs().constrained) EXPECT_EQ(s.q[d], 0.0);
    EXPECT_GT(max_abs(s.q), 0.0);
}

TEST(Biot, PenaltyRobustness) {
    const int nx = 40;
    const double L = 5.0;
    const BiotStokesProblem a(PhysicalParams{}, nx, 4, 3, {10.0, L / nx});
    const BiotStokesProblem b(PhysicalParams{}, nx, 4, 3, {100.0, L / nx});
    auto sa = a.zero_state(), sb = b.zero_state();
    const double dt = 1e-4;
    for (int n = 1; n <= 80; ++n) {
        sa = a.advance_biot(sa, dt, n * dt);
        sb = b.advance_biot(sb, dt, n * dt);
    }
    // default H = 0.01, so the model-comparison band is 0.25
    const auto& x = a.gamma_mesh().vertices;
    EXPECT_LE(relative_difference(x, a.midsurface_displacement(sa), b.midsurface_displacement(sb)), 0.25);
    EXPECT_LE(relative_difference(x, a.interface_pore_pressure(sa), b.interface_pore_pressure(sb)), 0.25);
}

TEST(Biot, InvalidNitscheRejected) {
    EXPECT_THROW(BiotStokesProblem(PhysicalParams{}, 2, 1, 1, {0.0, 1.0}), ValidationError);
    EXPECT_THROW(BiotStokesProblem(PhysicalParams{}, 2, 1, 1, {1.0, -1.0}), ValidationError);
}
