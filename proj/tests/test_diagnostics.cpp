#include "fpsi/diagnostics.hpp"
#include "fpsi/driver.hpp"
#include "fpsi/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fpsi;

namespace {

std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

PlateStokesState difference(const PlateStokesState& a, const PlateStokesState& b) {
    return {a.t, minus(a.u, b.u), minus(a.pi, b.pi), minus(a.w, b.w), minus(a.v, b.v), minus(a.qjump, b.qjump), minus(a.qbar, b.qbar)};
}

BiotStokesState difference(const BiotStokesState& a, const BiotStokesState& b) {
    return {a.t, minus(a.u, b.u), minus(a.pi, b.pi), minus(a.eta, b.eta), minus(a.xi, b.xi), minus(a.q, b.q)};
}

std::vector<EnergyBudget> series_from(std::vector<double> totals) {
    std::vector<EnergyBudget> s;
    for (double t : totals) s.push_back({t, 0.0, 0.0, 0.0});
    return s;
}

SimulationRecord record_with_profiles(const std::vector<double>& x, const std::vector<double>& t,
                                      const std::vector<std::vector<double>>& w, const std::vector<std::vector<double>>& q) {
    SimulationRecord r;
    r.gamma_x = x;
    for (std::size_t k = 0; k < t.size(); ++k) {
        Snapshot s;
        s.t = t[k];
        s.displacement = w[k];
        s.pressure_jump = q[k];
        r.times.push_back(t[k]);
        r.snapshots.push_back(s);
    }
    return r;
}

}  // namespace

TEST(Diagnostics, ZeroStateBudget) {
    const PlateStokesProblem p(PhysicalParams{}, 4, 2);
    const auto e = energy_budget(p, p.zero_state());
    EXPECT_EQ(e.e_kin, 0.0);
    EXPECT_EQ(e.e_pot, 0.0);
    EXPECT_EQ(e.dissipation_rate, 0.0);
    EXPECT_EQ(e.boundary_power, 0.0);
    const BiotStokesProblem b(PhysicalParams{}, 4, 2, 2, {});
    EXPECT_EQ(energy_budget(b, b.zero_state()).total(), 0.0);
}

TEST(Diagnostics, UniformFlowBudget) {
    const PhysicalParams params;
    const PlateStokesProblem p(params, 6, 3);
    auto s = p.zero_state();
    for (int i = 0; i < p.velocity_dofs().n_dofs; ++i) s.u[i] = 1.0;
    const auto e = energy_budget(p, s);
    const auto& g = params.geometry;
    EXPECT_NEAR(e.e_kin, 0.5 * params.fluid.rho_f * g.L * g.R_f, 1e-13);
    EXPECT_NEAR(e.dissipation_rate, params.fluid.beta * g.L, 1e-13);
    EXPECT_EQ(e.e_pot, 0.0);
}

TEST(Diagnostics, SineBumpPotential) {
    const PhysicalParams params;
    const PlateStokesProblem p(params, 60, 1);
    const double L = params.geometry.L, H = params.geometry.H, k = std::numbers::pi / L;
    auto s = p.zero_state();
    const auto& x = p.gamma_mesh().vertices;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s.w[2 * i] = std::sin(k * x[i]);
        s.w[2 * i + 1] = k * std::cos(k * x[i]);
    }
    const auto pc = params.plate();
    const double exact = 0.5 * (pc.gamma_p * H * L / 2 + pc.D * H * H * H * std::pow(k, 4) * L / 2);
    const auto e = energy_budget(p, s);
    EXPECT_NEAR(e.e_pot, exact, 1e-5 * exact);
    EXPECT_EQ(e.e_kin, 0.0);
}

TEST(Diagnostics, CheckDissipation) {
    auto s = series_from({10, 9, 8, 7, 6, 5});
    EXPECT_TRUE(check_dissipation(s, 1e-10).pass);
    s[3].e_kin += 1.5;
    const auto r = check_dissipation(s, 1e-10);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.violations, (std::vector<int>{3}));
    EXPECT_NEAR(r.worst_excess, 0.05, 1e-15);
    EXPECT_TRUE(check_dissipation(series_from({4}), 1e-10).pass);
    EXPECT_TRUE(check_dissipation(series_from({}), 1e-10).pass);
    EXPECT_TRUE(check_dissipation(series_from({1.0, 1.0 + 1e-12}), 1e-10).pass);
}

TEST(Diagnostics, ExactDiscreteEnergyIdentityPlate) {
    PhysicalParams params;
    params.q_plus = 0.0;
    const PlateStokesProblem p(params, 8, 3);
    const double dt = 1e-4;
    auto s = p.bump_state(0.01);
    for (int n = 1; n <= 40; ++n) {
        const auto next = p.advance(s, dt, n * dt);
        const auto en = energy_budget(p, next), eo = energy_budget(p, s);
        const double lhs = en.total() - eo.total() + energy_budget(p, difference(next, s)).total() + dt * en.dissipation_rate;
        const double rhs = dt * en.boundary_power;
        const double scale = std::max({en.total(), eo.total(), std::abs(rhs)});
        EXPECT_LE(std::abs(lhs - rhs), 1e-8 * scale) << "step " << n;
        s = next;
    }
}

TEST(Diagnostics, ExactDiscreteEnergyIdentityBiot) {
    const BiotStokesProblem p(PhysicalParams{}, 8, 3, 2, {10.0, 5.0 / 8});
    const double dt = 1e-4;
    auto s = p.bump_state(0.01);
    for (int n = 1; n <= 40; ++n) {
        const auto next = p.advance_biot(s, dt, n * dt);
        const auto en = energy_budget(p, next), eo = energy_budget(p, s);
        const double lhs = en.total() - eo.total() + energy_budget(p, difference(next, s)).total() + dt * en.dissipation_rate;
        const double rhs = dt * en.boundary_power;
        const double scale = std::max({en.total(), eo.total(), std::abs(rhs)});
        EXPECT_LE(std::abs(lhs - rhs), 1e-8 * scale) << "step " << n;
        s = next;
    }
}

TEST(Diagnostics, IdentityDefectIsNumericalDissipation) {
    auto c = preset("desk-h01");
    c.nx_f = c.nx_p = 20;
    c.ny_f = 4;
    c.t_end = 0.005;
    c.params.pulse.p_max = 0.0;
    c.initial_bump = 0.05;
    const auto rec = run_simulation(c);
    ASSERT_TRUE(check_dissipation(rec, 1e-10).pass);
    // the scheme dissipates more than the continuous rate, never less
    for (std::size_t n = 0; n + 1 < rec.energy.size(); ++n) {
        const auto& a = rec.energy[n];
        const auto& b = rec.energy[n + 1];
        EXPECT_LE(b.total() - a.total() + c.dt * b.dissipation_rate, 1e-12 * rec.energy[0].total());
    }
    const double half = energy_identity_defect(rec.energy, c.dt);
    EXPECT_GT(half, 0.0);
    EXPECT_LT(half, 1.0);
}

TEST(Diagnostics, StepWaveArrival) {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> speed(50, 500), pos(0.5, 5.0), amp(0.1, 1e4);
    const double dt = 1e-5, tau = 1e-3, f = 0.2;
    for (int trial = 0; trial < 20; ++trial) {
        const double c = speed(rng), x = pos(rng), a = amp(rng);
        std::vector<double> t, front, step;
        for (int n = 0; n <= 8000; ++n) {
            t.push_back(n * dt);
            const double s = n * dt - x / c;
            front.push_back(a * std::clamp(s / tau, 0.0, 1.0));
            step.push_back(s >= 0 ? a : 0.0);
        }
        const auto r = wave_arrival_time(t, front, f);
        ASSERT_TRUE(r.arrived);
        EXPECT_NEAR(r.time - f * tau, x / c, 1e-12);
        const auto st = wave_arrival_time(t, step, f);
        ASSERT_TRUE(st.arrived);
        EXPECT_GE(st.time, x / c - dt);
        EXPECT_LE(st.time, x / c + 1e-15);
        EXPECT_FALSE(wave_arrival_time(t, front, 1.5).arrived);
    }
}

TEST(Diagnostics, ArrivalScaleInvariant) {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-1, 1), scale(1e-6, 1e6);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> t, s;
        for (int n = 0; n < 200; ++n) {
            t.push_back(n * 1e-3);
            s.push_back(std::sin(0.05 * n) * n + u(rng));
        }
        const double c = scale(rng);
        std::vector<double> scaled(s);
        for (double& v : scaled) v *= c;
        const auto a = wave_arrival_time(t, s, 0.3), b = wave_arrival_time(t, scaled, 0.3);
        ASSERT_EQ(a.arrived, b.arrived);
        EXPECT_NEAR(a.time, b.time, 1e-12);
    }
    const std::vector<double> t{0, 1, 2}, zero{0, 0, 0};
    EXPECT_FALSE(wave_arrival_time(t, zero, 0.2).arrived);
}

TEST(Diagnostics, ArrivalFromRecordProbe) {
    SimulationRecord r;
    for (int i = 0; i <= 10; ++i) r.gamma_x.push_back(0.5 * i);
    const double c = 200.0;
    for (int n = 0; n <= 400; ++n) {
        const double t = n * 1e-4;
        r.step_times.push_back(t);
        std::vector<double> prof;
        for (double x : r.gamma_x) prof.push_back(t >= x / c ? -3.0 : 0.0);
        r.jump_history.push_back(prof);
        r.displacement_history.push_back(prof);
        r.pressure_history.push_back(prof);
    }
    const auto a = wave_arrival_time(r, 5.0, 0.2);
    ASSERT_TRUE(a.arrived);
    EXPECT_NEAR(a.time, 5.0 / c, 1e-4);
    EXPECT_THROW(wave_arrival_time(r, 6.0, 0.2), ValidationError);
    const auto mid = probe_series(r, 2.25, ProbeQuantity::Displacement);
    EXPECT_EQ(mid.size(), 401u);
}

TEST(Diagnostics, ProfileNormExactForLinear) {
    const std::vector<double> x{0, 0.3, 1.0, 2.0};
    std::vector<double> v;
    for (double xi : x) v.push_back(2 * xi + 1);
    // integral of (2x+1)^2 on [0,2] = (5^3 - 1) / 6
    EXPECT_NEAR(profile_l2(x, v), std::sqrt(124.0 / 6), 1e-14);
}

TEST(Diagnostics, CompareIdenticalAndScaled) {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<std::vector<double>> w{{0, 0, 0, 0}, {0, 1, 2, 0}}, q{{0, 0, 0, 0}, {1, -1, 2, 0.5}};
    const auto a = record_with_profiles(x, {0, 0.01}, w, q);
    const auto d0 = compare_records(a, a);
    EXPECT_EQ(d0.max_displacement, 0.0);
    EXPECT_EQ(d0.max_pressure_jump, 0.0);
    auto w2 = w, q2 = q;
    for (auto& p : w2)
        for (double& v : p) v *= 2;
    for (auto& p : q2)
        for (double& v : p) v *= 2;
    const auto b = record_with_profiles(x, {0, 0.01}, w2, q2);
    const auto d = compare_records(a, b);
    EXPECT_EQ(d.times, (std::vector<double>{0, 0.01}));
    EXPECT_EQ(d.displacement[0], 0.0);
    EXPECT_NEAR(d.max_displacement, 0.5, 1e-15);
    EXPECT_NEAR(d.max_pressure_jump, 0.5, 1e-15);
    const std::vector<double> only{0.01};
    EXPECT_EQ(compare_records(a, b, only).times.size(), 1u);
}

TEST(Diagnostics, CompareMismatchRejected) {
    const auto a = record_with_profiles({0, 1, 2}, {0}, {{0, 1, 0}}, {{0, 1, 0}});
    const auto b = record_with_profiles({0, 1.5, 2}, {0}, {{0, 1, 0}}, {{0, 1, 0}});
    EXPECT_THROW(compare_records(a, b), DomainError);
    const auto c = record_with_profiles({0, 1, 2}, {0.5}, {{0, 1, 0}}, {{0, 1, 0}});
    EXPECT_THROW(compare_records(a, c), DomainError);
    const std::vector<double> missing{0.7};
    EXPECT_THROW(compare_records(a, a, missing), DomainError);
}

TEST(Diagnostics, CompareSymmetricAndTriangle) {
    std::mt19937 rng(14);
    std::normal_distribution<double> n(0, 1);
    std::vector<double> x;
    for (int i = 0; i <= 20; ++i) x.push_back(0.25 * i);
    auto random_record = [&] {
        std::vector<std::vector<double>> w(3, std::vector<double>(x.size())), q = w;
        for (auto* set : {&w, &q})
            for (auto& p : *set)
                for (double& v : p) v = n(rng);
        return record_with_profiles(x, {0, 0.01, 0.02}, w, q);
    };
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = random_record(), b = random_record(), c = random_record();
        const auto ab = compare_records(a, b), ba = compare_records(b, a);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_DOUBLE_EQ(ab.displacement[k], ba.displacement[k]);
            EXPECT_DOUBLE_EQ(ab.pressure_jump[k], ba.pressure_jump[k]);
            EXPECT_GE(ab.displacement[k], 0.0);
        }
        // the normalization varies per pair, so the triangle inequality holds for the raw L2 distances
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& A = a.snapshots[k].displacement;
            const auto& B = b.snapshots[k].displacement;
            const auto& C = c.snapshots[k].displacement;
            EXPECT_LE(profile_l2(x, minus(A, C)), profile_l2(x, minus(A, B)) + profile_l2(x, minus(B, C)) + 1e-12);
            const double nab = std::max(profile_l2(x, A), profile_l2(x, B));
            EXPECT_NEAR(ab.displacement[k] * nab, profile_l2(x, minus(A, B)), 1e-12);
        }
    }
}

TEST(Diagnostics, ComparisonFloorGuardsZeroSnapshot) {
    const auto a = record_with_profiles({0, 1}, {0}, {{0, 0}}, {{0, 0}});
    const auto d = compare_records(a, a);
    EXPECT_EQ(d.displacement[0], 0.0);
    EXPECT_FALSE(std::isnan(d.pressure_jump[0]));
}

TEST(Diagnostics, BackwardEulerSurrogateRatio) {
    auto be_error = [](double dt) {
        const int n = static_cast<int>(std::lround(1.0 / dt));
        return std::abs(std::pow(1.0 + dt, -n) - std::exp(-1.0));
    };
    auto be_diff = [](double dt) {
        const int n = static_cast<int>(std::lround(1.0 / dt));
        return std::abs(std::pow(1.0 + dt, -n) - std::pow(1.0 + dt / 2, -2 * n));
    };
    for (double dt : {0.01, 0.005, 0.0025}) {
        EXPECT_NEAR(be_error(dt) / be_error(dt / 2), 2.0, 0.02);
        EXPECT_NEAR(be_diff(dt) / be_diff(dt / 2), 2.0, 0.02);
    }
}

TEST(Diagnostics, ZeroDataRefinement) {
    SimConfig c;
    c.nx_f = c.nx_p = 8;
    c.ny_f = 2;
    c.t_end = 2e-3;
    c.params.pulse.p_max = 0.0;
    const std::vector<double> dts{4e-4, 2e-4};
    const auto rows = refinement_study(c, dts);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.diff_vs_half, 0.0);
        EXPECT_EQ(r.sup_u, 0.0);
        EXPECT_EQ(r.sup_qjump, 0.0);
    }
}

TEST(Diagnostics, RefinementOnBumpShrinks) {
    SimConfig c;
    c.nx_f = c.nx_p = 10;
    c.ny_f = 3;
    c.t_end = 8e-4;
    c.params.pulse.p_max = 0.0;
    c.initial_bump = 0.02;
    // steps must resolve the fastest plate mode of this mesh before the rate shows
    const std::vector<double> dts{5e-6, 2.5e-6, 1.25e-6};
    const auto rows = refinement_study(c, dts);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_GT(rows[0].diff_vs_half / rows[1].diff_vs_half, 1.6);
    EXPECT_GT(rows[1].diff_vs_half / rows[2].diff_vs_half, 1.6);
    for (const auto& r : rows) EXPECT_GT(r.sup_wxx, 0.0);
}

TEST(Diagnostics, RefinementValidatesList) {
    SimConfig c;
    c.nx_f = c.nx_p = 4;
    c.ny_f = 1;
    c.t_end = 1e-3;
    const std::vector<double> increasing{1e-4, 2e-4}, ragged{3e-4};
    EXPECT_THROW(refinement_study(c, increasing), ValidationError);
    EXPECT_THROW(refinement_study(c, ragged), ValidationError);
}
