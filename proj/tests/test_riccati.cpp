#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isopar/riccati.hpp"
#include "isopar/sampling.hpp"
#include "isopar/spherelevel.hpp"

using namespace isopar;
using Catch::Matchers::WithinAbs;

namespace {

RiccatiFamily space_form_family() {
    return RiccatiFamily(JacobiSpectrum::space_form(1.0, 4), {0.3, -0.2, 0.8, -1.1});
}

RiccatiFamily hyperbolic_family() {
    return RiccatiFamily(JacobiSpectrum::space_form(-1.0, 3), {0.4, -0.6, 2.0});
}

RiccatiFamily rank_one_family() {
    return RiccatiFamily(JacobiSpectrum::rank_one(1.0, 4.0, 3, 5), {0.2, -0.4, 0.6, 0.1, -0.3});
}

std::vector<double> samples_in(const RiccatiFamily& fam, double half_width, std::size_t count) {
    const auto [lo, hi] = fam.domain();
    const double a = std::max(lo, -half_width), b = std::min(hi, half_width);
    std::vector<double> ts;
    for (std::size_t i = 0; i < count; ++i) ts.push_back(a + (b - a) * static_cast<double>(i) / (count - 1.0));
    return ts;
}

std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

}  // namespace

TEST_CASE("scalar closed forms", "[riccati]") {
    for (double t : {-0.7, -0.1, 0.0, 0.25, 0.9}) {
        CHECK_THAT(riccati_closed(1.0, 0.0, t), WithinAbs(std::tan(t), 1e-14));
        CHECK_THAT(riccati_closed(-1.0, 0.0, t), WithinAbs(-std::tanh(t), 1e-14));
        CHECK_THAT(riccati_closed(0.0, 0.5, t), WithinAbs(0.5 / (1 - 0.5 * t), 1e-14));
        CHECK_THAT(riccati_closed(4.0, 0.0, t), WithinAbs(2 * std::tan(2 * t), 1e-12));
        CHECK_THAT(riccati_closed(-4.0, 2.0, t), WithinAbs(2.0, 0.0));
        CHECK_THAT(riccati_closed(-4.0, -2.0, t), WithinAbs(-2.0, 0.0));
    }
    // mu0 = 3 with kappa = -1: coth branch, mu = coth(c - t)
    const double c = std::atanh(1.0 / 3.0);
    CHECK_THAT(riccati_closed(-1.0, 3.0, 0.2), WithinAbs(1.0 / std::tanh(c - 0.2), 1e-12));
    CHECK_THAT(riccati_closed(-1.0, 3.0, 0.0), WithinAbs(3.0, 1e-14));
    CHECK_THAT(riccati_closed(1.0, -0.4, 0.0), WithinAbs(-0.4, 1e-15));
}

TEST_CASE("closed forms satisfy the ODE", "[riccati][property]") {
    for (std::uint64_t i = 0; i < 50; ++i) {
        const double kappa = random_uniform(301, 3 * i, -4.0, 4.0);
        const double mu0 = random_uniform(301, 3 * i + 1, -2.0, 2.0);
        const auto [lo, hi] = riccati_poles(kappa, mu0);
        CHECK(lo < 0.0);
        CHECK(hi > 0.0);
        const double a = std::max(lo + 0.05, -1.0), b = std::min(hi - 0.05, 1.0);
        const double t = a + (b - a) * random_uniform(301, 3 * i + 2, 0.0, 1.0);
        const double mu = riccati_closed(kappa, mu0, t);
        const double dmu = riccati_closed_derivative(kappa, mu0, t);
        INFO("kappa=" << kappa << " mu0=" << mu0 << " t=" << t);
        CHECK(std::abs(dmu - (mu * mu + kappa)) <= 1e-6 * std::max(1.0, std::abs(dmu)));
        const double h = 1e-5;
        const double fd = (riccati_closed(kappa, mu0, t + h) - riccati_closed(kappa, mu0, t - h)) / (2 * h);
        CHECK(std::abs(fd - dmu) <= 1e-6 * std::max(1.0, std::abs(dmu)));
    }
}

TEST_CASE("poles", "[riccati]") {
    const auto [lo, hi] = riccati_poles(1.0, 0.0);
    CHECK_THAT(lo, WithinAbs(-std::numbers::pi / 2, 1e-14));
    CHECK_THAT(hi, WithinAbs(std::numbers::pi / 2, 1e-14));
    CHECK(riccati_poles(0.0, 2.0).second == 0.5);
    CHECK(std::isinf(riccati_poles(0.0, 2.0).first));
    CHECK(riccati_poles(0.0, -2.0).first == -0.5);
    CHECK(std::isinf(riccati_poles(-1.0, 0.5).first));
    CHECK(std::isinf(riccati_poles(-1.0, 0.5).second));
    CHECK_THAT(riccati_poles(-1.0, 3.0).second, WithinAbs(std::atanh(1.0 / 3.0), 1e-14));
    CHECK_THAT(riccati_poles(-1.0, -3.0).first, WithinAbs(-std::atanh(1.0 / 3.0), 1e-14));
}

TEST_CASE("Runge-Kutta agrees with the closed forms", "[riccati]") {
    for (const RiccatiFamily& fam : {space_form_family(), hyperbolic_family(), rank_one_family(),
                                     RiccatiFamily(JacobiSpectrum::space_form(0.0, 2), {0.5, -0.5})}) {
        for (double t : {-0.5, -0.2, 0.3, 0.5}) {
            const auto num = evolve_numeric(fam, t, 1000);
            const auto cl = evolve_closed(fam, t);
            for (std::size_t k = 0; k < cl.size(); ++k) CHECK(std::abs(num[k] - cl[k]) < 1e-8);
        }
        CHECK(evolve_numeric(fam, 0.0, 0) == fam.mu0());
        CHECK_THROWS_AS(evolve_numeric(fam, 0.1, 0), RangeError);
    }
}

TEST_CASE("solutions are determined by the initial value", "[riccati]") {
    // distinct starting values never meet inside the domain
    const RiccatiFamily fam(JacobiSpectrum::space_form(1.0, 2), {0.1, 0.1 + 1e-6});
    for (double t : samples_in(fam, 1.0, 21)) {
        const auto mu = evolve_closed(fam, t);
        CHECK(mu[1] > mu[0]);
    }
    const RiccatiFamily same(JacobiSpectrum::space_form(1.0, 2), {0.1, 0.1});
    for (double t : samples_in(same, 1.0, 11)) {
        const auto mu = evolve_closed(same, t);
        CHECK(mu[0] == mu[1]);
    }
}

TEST_CASE("unit sphere: parallel levels follow the cot spectrum", "[riccati]") {
    const int g = 4, m1 = 2, m2 = 1;
    const double level = 0.3;
    const MunznerSpectrum s0 = MunznerSpectrum::at(g, m1, m2, level);
    const std::vector<double> mu0 = s0.expanded();
    const RiccatiFamily fam(JacobiSpectrum::space_form(1.0, mu0.size()), mu0);
    for (double t : {-0.2, -0.05, 0.1, 0.25}) {
        const auto mu = sorted_desc(evolve_closed(fam, t));
        const auto expect = MunznerSpectrum::at(g, m1, m2, std::cos(g * (s0.tau - t))).expanded();
        REQUIRE(mu.size() == expect.size());
        for (std::size_t k = 0; k < mu.size(); ++k) CHECK_THAT(mu[k], WithinAbs(expect[k], 1e-10));
    }
}

TEST_CASE("Gamma identities", "[riccati]") {
    const RiccatiFamily sf = space_form_family();
    for (double t : samples_in(sf, 0.5, 5))
        for (int i = 0; i <= 5; ++i)
            for (int j = 0; j <= 2; ++j)
                CHECK_THAT(gamma_ij(sf, t, i, j), WithinAbs(std::pow(1.0, j) * power_sum_q(sf, t, i), 1e-12));

    const RiccatiFamily hf = hyperbolic_family();
    for (double t : samples_in(hf, 0.3, 5))
        for (int i = 0; i <= 4; ++i)
            CHECK_THAT(gamma_ij(hf, t, i, 1), WithinAbs(-power_sum_q(hf, t, i), 1e-12));

    const RiccatiFamily r1 = rank_one_family();
    CHECK(power_sum_q(r1, 0.0, 0) == 5.0);
    CHECK(gamma_ij(r1, 0.0, 0, 1) == 2.0 + 12.0);
    for (double t : samples_in(r1, 0.3, 5))
        for (int i = 0; i <= 5; ++i) {
            const auto [phi, psi] = split_power_sums(r1, t, i);
            CHECK_THAT(phi + psi, WithinAbs(power_sum_q(r1, t, i), 1e-12));
            CHECK_THAT(gamma_ij(r1, t, i, 1), WithinAbs(1.0 * phi + 4.0 * psi, 1e-11));
            CHECK_THAT(gamma_ij(r1, t, i, 2), WithinAbs(1.0 * phi + 16.0 * psi, 1e-10));
        }
}

TEST_CASE("Jacobi spectrum construction", "[riccati]") {
    const JacobiSpectrum j = JacobiSpectrum::rank_one(1.0, 4.0, 1, 3);
    CHECK(j.kappas == std::vector<double>{1.0, 1.0, 4.0});
    CHECK(j.in_first_block(1));
    CHECK_FALSE(j.in_first_block(2));
    CHECK_THROWS_AS(JacobiSpectrum::rank_one(1.0, 4.0, 2, 5), RangeError);
    CHECK_THROWS_AS(JacobiSpectrum::rank_one(1.0, 4.0, 3, 3), RangeError);
    CHECK_THROWS_AS(JacobiSpectrum::rank_one(1.0, 1.0, 1, 3), RangeError);
    CHECK_THROWS_AS(JacobiSpectrum::space_form(1.0, 0), RangeError);
    CHECK_THROWS_AS(RiccatiFamily(JacobiSpectrum::space_form(1.0, 3), {0.0, 0.0}), RangeError);
}

TEST_CASE("moment recursions along the flow", "[riccati]") {
    const auto sf = space_form_family();
    const auto hf = hyperbolic_family();
    const auto r1 = rank_one_family();
    for (const RiccatiFamily* f : {&sf, &hf}) {
        const auto ts = samples_in(*f, 0.5, 11);
        CHECK(check_power_sum_recurrence(*f, ts, 6) < 1e-10);
        CHECK(check_gamma_recurrence(*f, ts, 6) < 1e-10);
        CHECK(check_mean_curvature_riccati(*f, ts) < 1e-10);
    }
    const auto ts = samples_in(r1, 0.4, 11);
    CHECK(check_power_sum_recurrence(r1, ts, 6) < 1e-9);
    CHECK(check_gamma_recurrence(r1, ts, 6) < 1e-9);
    CHECK(check_mean_curvature_riccati(r1, ts) < 1e-10);
    CHECK(check_split_recurrences(r1, ts, 6) < 1e-10);
    CHECK(check_split_recurrences(sf, samples_in(sf, 0.5, 11), 6) < 1e-10);
}

TEST_CASE("first recursion step at t = 0", "[riccati]") {
    // Q_2 = H' - tr R
    const RiccatiFamily fam = rank_one_family();
    double q2 = 0.0, h_dot = 0.0, tr_r = 0.0;
    for (std::size_t k = 0; k < fam.size(); ++k) {
        const double mu = fam.mu0()[k], kappa = fam.jacobi().kappas[k];
        q2 += mu * mu;
        h_dot += mu * mu + kappa;
        tr_r += kappa;
    }
    CHECK_THAT(gamma_ij_derivative(fam, 0.0, 1, 0), WithinAbs(h_dot, 1e-14));
    CHECK_THAT(power_sum_q(fam, 0.0, 2), WithinAbs(q2, 1e-15));
    CHECK_THAT(gamma_ij_derivative(fam, 0.0, 1, 0) - gamma_ij(fam, 0.0, 0, 1), WithinAbs(q2, 1e-14));
    CHECK(gamma_ij_derivative(fam, 0.3, 0, 2) == 0.0);
}

TEST_CASE("jets of Gamma_ij", "[riccati]") {
    const RiccatiFamily fam = rank_one_family();
    const double t = 0.1, h = 1e-4;
    for (int i = 1; i <= 4; ++i) {
        CHECK_THAT(gamma_ij_jet(fam, t, i, 1, 0), WithinAbs(gamma_ij(fam, t, i, 1), 1e-13));
        CHECK_THAT(gamma_ij_jet(fam, t, i, 1, 1), WithinAbs(gamma_ij_derivative(fam, t, i, 1), 1e-12));
        const double fd2 =
            (gamma_ij(fam, t + h, i, 0) - 2 * gamma_ij(fam, t, i, 0) + gamma_ij(fam, t - h, i, 0)) / (h * h);
        CHECK(std::abs(gamma_ij_jet(fam, t, i, 0, 2) - fd2) < 1e-5 * std::max(1.0, std::abs(fd2)));
    }
}

TEST_CASE("Q4 and Q5 from lower power sums", "[riccati]") {
    for (const RiccatiFamily& fam : {space_form_family(), hyperbolic_family(), rank_one_family()}) {
        for (double t : samples_in(fam, 0.4, 9)) {
            const PropagationResult r = propagate_q4_q5(fam, t);
            CHECK(r.max_discrepancy < 1e-8);
            CHECK(std::abs(r.q4_chain - r.q4_direct) <= 1e-8 * std::max(1.0, std::abs(r.q4_direct)));
        }
    }
}

TEST_CASE("spectrum recovered from the evolving moments", "[riccati]") {
    for (const RiccatiFamily& fam : {space_form_family(), hyperbolic_family(), rank_one_family()}) {
        for (double t : samples_in(fam, 0.4, 7)) {
            const RecoveredSpectrum rec = moment_to_spectrum_evolution(fam, t);
            const auto mu = sorted_desc(evolve_closed(fam, t));
            const auto got = rec.spectrum.values;
            REQUIRE(got.size() == mu.size());
            for (std::size_t k = 0; k < mu.size(); ++k) CHECK(std::abs(got[k] - mu[k]) < 1e-6);
        }
    }
}

TEST_CASE("blow-up", "[riccati]") {
    const RiccatiFamily fam(JacobiSpectrum::space_form(1.0, 2), {0.0, 1.0});
    const auto [lo, hi] = fam.blow_up_times();
    CHECK_THAT(hi, WithinAbs(std::numbers::pi / 4, 1e-14));
    CHECK_THAT(lo, WithinAbs(-std::numbers::pi / 2, 1e-14));
    CHECK_THAT(fam.domain().second, WithinAbs(std::numbers::pi / 4 - kBlowUpBand, 1e-14));
    try {
        evolve_closed(fam, 1.0);
        FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
        CHECK_THAT(e.blow_up_time(), WithinAbs(std::numbers::pi / 4, 1e-14));
    }
    CHECK_THROWS_AS(evolve_closed(fam, std::numbers::pi / 4 - 0.5 * kBlowUpBand), BlowUpError);
    CHECK_NOTHROW(evolve_closed(fam, std::numbers::pi / 4 - 2 * kBlowUpBand));
    CHECK_THROWS_AS(evolve_numeric(fam, -2.0, 100), BlowUpError);
    CHECK_THROWS_AS(power_sum_q(fam, 1.0, 2), BlowUpError);
}

TEST_CASE("trajectories", "[riccati]") {
    const RiccatiFamily fam(JacobiSpectrum::space_form(0.0, 2), {1.0, -0.5});
    const Trajectory tr = trajectory(fam, 0.0, 2.0, 20, 3);
    CHECK_FALSE(tr.complete);
    CHECK(tr.blow_up == 1.0);
    REQUIRE(tr.rows.size() == 10);
    for (const auto& row : tr.rows) {
        CHECK_THAT(row.mu[0], WithinAbs(1.0 / (1.0 - row.t), 1e-12));
        CHECK(row.q.size() == 3);
        CHECK_THAT(row.mean_curvature, WithinAbs(row.mu[0] + row.mu[1], 1e-15));
    }

    const Trajectory ok = trajectory(space_form_family(), -0.2, 0.2, 4, 2);
    CHECK(ok.complete);
    CHECK(ok.rows.size() == 5);
    CHECK_THAT(ok.rows[2].t, WithinAbs(0.0, 1e-16));
    for (std::size_t k = 0; k < 4; ++k) CHECK_THAT(ok.rows[2].mu[k], WithinAbs(space_form_family().mu0()[k], 1e-14));

    const Trajectory one = trajectory(space_form_family(), 0.1, 0.5, 0, 1);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].t == 0.1);
}
