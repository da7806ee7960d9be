#include "bbq/errors.hpp"
#include "bbq/rcsj.hpp"
#include "rcsj_fixtures.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace bbq;

namespace {

SweepOptions short_sweep(double tol = 1e-8) {
    SweepOptions o;
    o.settle_periods = 30;
    o.average_periods = 100;
    o.tol = tol;
    return o;
}

double measured_plasma_omega(const RcsjParams& p, double phi0, double periods, double tol) {
    const double wp = fixture::plasma_omega_oracle(p);
    const double t_end = periods * oracle::two_pi() / wp;
    const auto traj = integrate(p, [](double) { return 0.0; }, PhaseState{phi0, 0.0, 0.0}, t_end, tol);
    const auto zc = fixture::upward_zero_crossings(traj);
    if (zc.size() < 2) return 0.0;
    return oracle::two_pi() * static_cast<double>(zc.size() - 1) / (zc.back() - zc.front());
}

} // namespace

TEST(RcsjParams, DerivedQuantities) {
    const auto p = fixture::junction(25.0, 0.01);
    EXPECT_NEAR(p.beta_c(), 25.0, 1e-12 * 25.0);
    EXPECT_NEAR(p.plasma_omega(), fixture::plasma_omega_oracle(p), 1e-12 * p.plasma_omega());
    EXPECT_NEAR(p.gap_voltage(), 0.01 * p.i_c * p.r_n, 1e-12 * p.gap_voltage());
    const auto q = params_for_beta(p.i_c, p.c_j, 25.0, p.delta0);
    EXPECT_NEAR(q.r_n, p.r_n, 1e-12 * p.r_n);
    auto bad = p;
    bad.c_j = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = p;
    bad.gap_smoothing = 1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(JunctionConductance, PlateausAndWindowEdges) {
    const auto p = fixture::junction(1.0, 0.5);
    const double vg = p.gap_voltage();
    const double w = p.gap_smoothing * vg;
    EXPECT_EQ(junction_conductance(0.0, p), 0.0);
    EXPECT_EQ(junction_conductance(10 * vg, p), 1.0 / p.r_n);
    EXPECT_EQ(junction_conductance(-10 * vg, p), 1.0 / p.r_n);
    EXPECT_EQ(junction_conductance(0.5 * vg, p), 0.0);
    for (double sign : {1.0, -1.0}) {
        const double edge = sign * (vg + w);
        EXPECT_DOUBLE_EQ(junction_conductance(edge, p), 1.0 / p.r_n);
        EXPECT_NEAR(junction_conductance(edge * (1 - 1e-12), p), 1.0 / p.r_n, 1e-6 / p.r_n);
        EXPECT_DOUBLE_EQ(junction_conductance(edge * (1 + 1e-12), p), 1.0 / p.r_n);
        const double low = sign * (vg - w);
        EXPECT_EQ(junction_conductance(low, p), 0.0);
        EXPECT_NEAR(junction_conductance(low * (1 + 1e-12), p), 0.0, 1e-6 / p.r_n);
        EXPECT_NEAR(junction_conductance(sign * vg, p), 0.5 / p.r_n, 1e-9 / p.r_n);
    }
    // Monotone across the ramp.
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
        const double g = junction_conductance(vg - 2 * w + 4 * w * k / 100.0, p);
        EXPECT_GE(g, prev);
        prev = g;
    }
}

TEST(Integrate, EquilibriumStaysPut) {
    const auto p = fixture::junction(1.0, 10.0);
    const double t_end = 50.0 / p.plasma_omega();
    const auto traj = integrate(p, [](double) { return 0.0; }, PhaseState{}, t_end, 1e-10);
    ASSERT_GE(traj.size(), 2u);
    for (const auto& s : traj) {
        EXPECT_EQ(s.phi, 0.0);
        EXPECT_EQ(s.dphi_dt, 0.0);
    }
    EXPECT_EQ(traj.back().time, t_end);
    EXPECT_EQ(traj.front().time, 0.0);
}

TEST(Integrate, PlasmaFrequencyAcrossDamping) {
    for (double beta : {0.01, 1.0, 25.0}) {
        // Gap well above the oscillation voltage, so no quasiparticle damping.
        const auto p = fixture::junction(beta, 10.0);
        const double measured = measured_plasma_omega(p, 0.01, 50, 1e-10);
        EXPECT_LT(oracle::rel_err(measured, fixture::plasma_omega_oracle(p)), 1e-3) << "beta_c " << beta;
    }
}

TEST(Integrate, UndampedEnergyIsConserved) {
    auto p = fixture::junction(1.0, 1.0);
    p.delta0 = 1e6 * oracle::e;  // gap voltage of megavolts
    const double t_end = 100.0 * oracle::two_pi() / p.plasma_omega();
    const auto traj = integrate(p, [](double) { return 0.0; }, PhaseState{1.0, 0.0, 0.0}, t_end, 1e-12);
    const double e0 = fixture::junction_energy(p, traj.front());
    double worst = 0.0;
    for (const auto& s : traj) worst = std::max(worst, std::abs(fixture::junction_energy(p, s) - e0) / e0);
    EXPECT_LT(worst, 1e-8);
}

TEST(Integrate, VoltageFollowsPhaseVelocity) {
    const PhaseState s{0.3, 2e11, 0.0};
    EXPECT_NEAR(s.voltage(), oracle::phi0 / oracle::two_pi() * 2e11, 1e-12 * s.voltage());
}

TEST(Integrate, ArgumentAndFailureErrors) {
    const auto p = fixture::junction(1.0, 1.0);
    auto zero = [](double) { return 0.0; };
    EXPECT_THROW(integrate(p, zero, PhaseState{}, 0.0, 1e-8), std::invalid_argument);
    EXPECT_THROW(integrate(p, zero, PhaseState{}, 1e-9, 0.0), std::invalid_argument);
    EXPECT_THROW(integrate(p, zero, PhaseState{std::nan(""), 0.0, 0.0}, 1e-9, 1e-8), SimulationError);
    auto broken = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
    try {
        integrate(p, broken, PhaseState{}, 1e-9, 1e-8);
        FAIL();
    } catch (const SimulationError& e) {
        EXPECT_NE(std::string(e.what()).find("t = "), std::string::npos) << e.what();
    }
}

TEST(IvSweep, OverdampedMatchesClosedForm) {
    const auto p = fixture::junction(0.01, 1e-3);
    const double icr = p.i_c * p.r_n;
    const auto [up, down] = iv_sweep(p, 1.5 * p.i_c, 6, short_sweep());
    ASSERT_EQ(up.points.size(), 6u);
    ASSERT_EQ(down.points.size(), 6u);
    EXPECT_EQ(up.branch, Branch::SweepUp);
    EXPECT_EQ(down.branch, Branch::SweepDown);
    const double i = 1.5 * p.i_c;
    const double expected = p.r_n * std::sqrt(i * i - p.i_c * p.i_c);
    EXPECT_LT(oracle::rel_err(up.points.back().v_avg, expected), 0.01);
    EXPECT_LT(oracle::rel_err(down.points.front().v_avg, expected), 0.01);
    for (std::size_t k = 0; k < up.points.size(); ++k) {
        const auto& u = up.points[k];
        const auto& d = down.points[up.points.size() - 1 - k];
        EXPECT_EQ(u.i_drive, d.i_drive);
        if (u.i_drive == 0.0) continue;
        EXPECT_LE(std::abs(u.v_avg - d.v_avg), 0.01 * p.r_n * u.i_drive) << "point " << k;
        if (u.i_drive < p.i_c) EXPECT_LT(std::abs(u.v_avg), 1e-3 * icr);
        if (u.i_drive > p.i_c) {
            const double closed = p.r_n * std::sqrt(u.i_drive * u.i_drive - p.i_c * p.i_c);
            EXPECT_LT(oracle::rel_err(u.v_avg, closed), 0.01) << "point " << k;
        }
    }
}

TEST(IvSweep, UnderdampedBranchesEncloseHysteresis) {
    const auto p = fixture::junction(25.0, 1e-3);
    const double icr = p.i_c * p.r_n;
    const auto [up, down] = iv_sweep(p, 1.5 * p.i_c, 31, short_sweep());
    const double i_sw = switching_current(up, 1e-3 * icr);
    const double i_r = retrapping_current(down, 1e-3 * icr);
    EXPECT_GE(i_sw, 0.95 * p.i_c);
    EXPECT_LE(i_sw, 1.05 * p.i_c);
    EXPECT_LT(i_r, 0.5 * p.i_c);
    EXPECT_GT(i_r, 0.0);
    // The drive is monotone along each branch.
    for (std::size_t k = 1; k < up.points.size(); ++k) {
        EXPECT_GT(up.points[k].i_drive, up.points[k - 1].i_drive);
        EXPECT_LT(down.points[k].i_drive, down.points[k - 1].i_drive);
    }
}

TEST(IvSweep, NegativeDriveMirrorsCurve) {
    const auto p = fixture::junction(4.0, 1e-3);
    const auto [up_pos, down_pos] = iv_sweep(p, 1.4 * p.i_c, 8, short_sweep());
    const auto [up_neg, down_neg] = iv_sweep(p, -1.4 * p.i_c, 8, short_sweep());
    const double icr = p.i_c * p.r_n;
    for (std::size_t k = 0; k < up_pos.points.size(); ++k) {
        EXPECT_EQ(up_neg.points[k].i_drive, -up_pos.points[k].i_drive);
        EXPECT_NEAR(up_neg.points[k].v_avg, -up_pos.points[k].v_avg, 1e-6 * icr);
        EXPECT_NEAR(down_neg.points[k].v_avg, -down_pos.points[k].v_avg, 1e-6 * icr);
    }
}

TEST(IvSweep, HalvingToleranceChangesLittle) {
    for (double beta : {0.01, 25.0}) {
        const auto p = fixture::junction(beta, 1e-3);
        const double icr = p.i_c * p.r_n;
        const auto [up_a, down_a] = iv_sweep(p, 1.5 * p.i_c, 6, short_sweep(1e-8));
        const auto [up_b, down_b] = iv_sweep(p, 1.5 * p.i_c, 6, short_sweep(5e-9));
        auto check = [&](const IVCurve& a, const IVCurve& b) {
            for (std::size_t k = 0; k < a.points.size(); ++k) {
                const double scale = std::max(std::abs(a.points[k].v_avg), 1e-3 * icr);
                EXPECT_LT(std::abs(a.points[k].v_avg - b.points[k].v_avg), 0.01 * scale)
                    << "beta_c " << beta << " point " << k;
            }
        };
        check(up_a, up_b);
        check(down_a, down_b);
    }
}

TEST(IvSweep, ObserverSeesStatesAndArgumentsAreChecked) {
    const auto p = fixture::junction(1.0, 1e-3);
    auto opts = short_sweep();
    opts.settle_periods = 2;
    opts.average_periods = 2;
    std::size_t seen = 0;
    double last_time = -1.0;
    opts.observer = [&](const PhaseState& s, double) {
        EXPECT_GT(s.time, last_time);
        last_time = s.time;
        ++seen;
    };
    iv_sweep(p, 2 * p.i_c, 3, opts);
    EXPECT_GT(seen, 6u);
    EXPECT_THROW(iv_sweep(p, p.i_c, 1), std::invalid_argument);
    EXPECT_THROW(iv_sweep(p, 0.0, 5), std::invalid_argument);
    opts.average_periods = 0;
    EXPECT_THROW(iv_sweep(p, p.i_c, 5, opts), std::invalid_argument);
}

TEST(SweepSummaries, ThresholdCrossings) {
    IVCurve up{Branch::SweepUp, {{0.0, 0.0}, {1.0, 1e-9}, {2.0, 1.0}, {3.0, 2.0}}};
    IVCurve down{Branch::SweepDown, {{3.0, 2.0}, {2.0, 1.0}, {1.0, 0.5}, {0.0, 0.0}}};
    EXPECT_EQ(switching_current(up, 1e-3), 2.0);
    EXPECT_EQ(retrapping_current(down, 1e-3), 0.0);
    down.points[2].v_avg = 1e-6;
    EXPECT_EQ(retrapping_current(down, 1e-3), 1.0);
    up.points[2].v_avg = up.points[3].v_avg = 0.0;
    EXPECT_TRUE(std::isinf(switching_current(up, 1e-3)));
}
