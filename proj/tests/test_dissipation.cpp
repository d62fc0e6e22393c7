// Copyright 2026 The flsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <cmath>

#include "flsim/dissipation.hpp"
#include "flsim/dynamics.hpp"
#include "flsim/errors.hpp"
#include "support.hpp"

using namespace flsim;

namespace {

// Amplitudes of r <-> p under H = Omega/2 (|r><p| + h.c.) with p decaying at gamma.
std::pair<cplx, cplx> dressed_amplitudes(double omega, double gamma, double t) {
    const cplx root = std::sqrt(cplx(gamma * gamma / 16.0 - omega * omega / 4.0, 0.0));
    const cplx sp = -gamma / 4.0 + root, sm = -gamma / 4.0 - root;
    const cplx cr = (sp * std::exp(sm * t) - sm * std::exp(sp * t)) / (sp - sm);
    const cplx dcr = sp * sm * (std::exp(sm * t) - std::exp(sp * t)) / (sp - sm);
    return {cr, 2.0 * I * dcr / omega};
}

Operator excited(const SingleAtomModel& m) {
    const int n = static_cast<int>(m.levels.size());
    Operator rho = Operator::Zero(n, n);
    rho(m.index("r"), m.index("r")) = 1.0;
    return rho;
}

}  // namespace

TEST_CASE("engineered rates at the default dressing") {
    const DecayParams d;
    CHECK(d.Gamma1() == doctest::Approx(mhz(0.2424)).epsilon(1e-12));
    CHECK(d.Gamma2() == doctest::Approx(mhz(0.23)).epsilon(1e-12));
    CHECK(d.Gamma3() == doctest::Approx(d.Gamma2() * d.gamma3 / d.gamma2));
    CHECK(d.validate());
}

TEST_CASE("effective channel lists") {
    const DecayParams d;
    const auto cd = effective_channels(ChannelKind::CD, d);
    REQUIRE(cd.size() == 3);
    for (const auto& c : cd) CHECK(c.rate == doctest::Approx(d.Gamma1()));
    CHECK(std::abs(cd[0].op(basis_index(0, 1, 1), basis_index(kRyd, 1, 1))) == 1.0);

    const auto ucd = effective_channels(ChannelKind::UCD, d);
    REQUIRE(ucd.size() == 6);
    for (const auto& c : ucd) CHECK(c.rate == doctest::Approx(d.Gamma2() / 2));
    const auto nat = effective_channels(ChannelKind::NaturalRydberg, d);
    REQUIRE(nat.size() == 6);
    for (const auto& c : nat) CHECK(c.rate == doctest::Approx(d.gamma_r / 2));

    DecayParams off;
    off.omega_d1 = 0.0;
    CHECK(effective_channels(ChannelKind::CD, off).empty());
    EngineeredChannelSpec spec{ChannelKind::UCD, {}};
    const auto br = spec.resolved_branching();
    CHECK(br.at(kG0) == 0.5);
    CHECK(br.at(kG1) == 0.5);
}

TEST_CASE("effective CD propagation follows the exponential law") {
    const DecayParams d;
    const SingleAtomModel m = effective_cd_model(d);
    const double window = 12.0 / d.Gamma1();
    const Trajectory tr = propagate_const(excited(m), m.hamiltonian, m.channels, window, 60);
    double worst = 0.0;
    for (size_t i = 0; i < tr.times.size(); ++i) {
        const double p0 = tr.states[i](m.index("0"), m.index("0")).real();
        worst = std::max(worst, std::abs(p0 - cd_ground_population(d.Gamma1(), tr.times[i])));
    }
    CHECK(worst < 1e-8);
    CHECK(tr.states[0](m.index("r"), m.index("r")).real() == 1.0);
}

TEST_CASE("full CD model matches the dressed two-level solution") {
    const DecayParams d;
    const SingleAtomModel m = full_cd_model(d);
    const double window = 12.0 / d.Gamma1();
    const Trajectory tr = propagate_const(excited(m), m.hamiltonian, m.channels, window, 120);
    double worst = 0.0;
    for (size_t i = 0; i < tr.times.size(); ++i) {
        const auto [cr, cp] = dressed_amplitudes(d.omega_d1, d.gamma1, tr.times[i]);
        const double p0 = 1.0 - std::norm(cr) - std::norm(cp);
        worst = std::max(worst, std::abs(tr.states[i](m.index("0"), m.index("0")).real() - p0));
    }
    CHECK(worst < 1e-8);
    const double p_tau = tr.states.back()(m.index("0"), m.index("0")).real();
    CHECK(p_tau > 0.9999);
}

TEST_CASE("effective UCD propagation follows the closed form") {
    const DecayParams d;
    const SingleAtomModel m = effective_ucd_model(d);
    const double window = 12.0 / d.Gamma2();
    const Trajectory tr = propagate_const(excited(m), m.hamiltonian, m.channels, window, 60);
    double worst = 0.0;
    for (size_t i = 0; i < tr.times.size(); ++i) {
        const double g = (tr.states[i](m.index("0"), m.index("0")) + tr.states[i](m.index("1"), m.index("1"))).real();
        worst = std::max(worst, std::abs(g - ucd_ground_population(d.Gamma2(), d.Gamma3(), tr.times[i])));
    }
    CHECK(worst < 1e-8);
    CHECK(ucd_ground_population(d.Gamma2(), d.Gamma3(), 0.0) == 0.0);
}

TEST_CASE("UCD closed form at the degenerate rate ratio") {
    const double g2 = 1.0, g3 = 3.0;
    const double eps = 1e-7;
    for (double t : {0.5, 2.0, 7.0}) {
        CHECK(ucd_ground_population(g2, g3, t) ==
              doctest::Approx(ucd_ground_population(g2, g3 * (1 + eps), t)).epsilon(1e-6));
    }
}

TEST_CASE("full UCD model recycles alpha and ends in an even mixture") {
    const DecayParams d;
    const SingleAtomModel m = full_ucd_model(d);
    const Trajectory tr = propagate_const(excited(m), m.hamiltonian, m.channels, 30.0 / d.Gamma2(), 1);
    const Operator& rho = tr.final_state();
    CHECK(rho(m.index("alpha"), m.index("alpha")).real() < 1e-3);
    CHECK(rho(m.index("0"), m.index("0")).real() == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(rho(m.index("1"), m.index("1")).real() == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("CD never populates level 1") {
    const DecayParams d;
    std::mt19937_64 rng(21);
    // Random state supported on {0, r} for every atom.
    std::vector<int> idx;
    for (int a : {kG0, kRyd}) {
        for (int b : {kG0, kRyd}) {
            for (int c : {kG0, kRyd}) idx.push_back(basis_index(a, b, c));
        }
    }
    const Matrix small = flsim::testing::random_density(rng, 8);
    Operator rho = Operator::Zero(kDim, kDim);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) rho(idx[i], idx[j]) = small(i, j);
    }
    const Trajectory tr = propagate_const(rho, Operator::Zero(kDim, kDim), effective_channels(ChannelKind::CD, d),
                                          10.0 / d.Gamma1(), 5);
    Operator n1 = Operator::Zero(kDim, kDim);
    for (int a = 0; a < 3; ++a) n1 += site_op(sigma(kG1, kG1), a);
    for (const auto& r : tr.states) CHECK(std::abs((n1 * r).trace()) < 1e-10);
}

TEST_CASE("decay durations") {
    const DecayParams d;
    CHECK(decay_duration(0.99, ChannelKind::CD, d) * d.Gamma1() == doctest::Approx(std::log(100.0)).epsilon(1e-12));
    CHECK(decay_duration(0.5, ChannelKind::CD, d) * d.Gamma1() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const double t = decay_duration(0.99, ChannelKind::UCD, d);
    CHECK(ucd_ground_population(d.Gamma2(), d.Gamma3(), t) == doctest::Approx(0.99).epsilon(1e-9));
    CHECK(ucd_ground_population(d.Gamma2(), d.Gamma3(), 0.999 * t) < 0.99);
    CHECK_THROWS_AS(decay_duration(1.0, ChannelKind::CD, d), InvalidInput);
    CHECK_THROWS_AS(decay_duration(0.0, ChannelKind::UCD, d), InvalidInput);
}

TEST_CASE("decay parameter validation") {
    DecayParams d;
    d.omega_d1 = 0.3 * d.gamma1;
    CHECK_FALSE(d.validate());
    d.gamma2 = -1.0;
    CHECK_THROWS_AS(d.validate(), InvalidInput);
}
