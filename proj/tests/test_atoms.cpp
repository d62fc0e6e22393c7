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

#include "flsim/atoms.hpp"
#include "flsim/dynamics.hpp"
#include "flsim/errors.hpp"
#include "support.hpp"

using namespace flsim;
using flsim::testing::max_abs;

namespace {

const std::vector<PumpVariant> kAllVariants = {PumpVariant::EP0, PumpVariant::EP1, PumpVariant::SE0, PumpVariant::SE1,
                                               PumpVariant::SEplus};

LaserParams params(PumpVariant v) {
    LaserParams p;
    p.variant = v;
    return p;
}

int rydberg_count(int index) {
    int n = 0;
    for (int a = 0; a < 3; ++a) {
        if (index % 3 == kRyd) ++n;
        index /= 3;
    }
    return n;
}

}  // namespace

TEST_CASE("basis index is atom-major with level order 0, 1, r") {
    CHECK(basis_index(0, 0, 0) == 0);
    CHECK(basis_index(0, 0, 1) == 1);
    CHECK(basis_index(1, 0, 0) == 9);
    CHECK(basis_index(kRyd, kRyd, kRyd) == 26);
    CHECK(ket(0, 1, 2)(basis_index(0, 1, 2)) == cplx(1.0, 0.0));
    CHECK_THROWS_AS(basis_index(3, 0, 0), InvalidInput);
}

TEST_CASE("named states are normalized and the ground families are orthonormal") {
    const std::vector<std::string> ground = {"GHZ+", "GHZ-", "W0", "W0'", "W0''", "W1", "W1'", "W1''"};
    for (size_t a = 0; a < ground.size(); ++a) {
        for (size_t b = 0; b < ground.size(); ++b) {
            const cplx ov = named_state(ground[a]).dot(named_state(ground[b]));
            CHECK(std::abs(ov - (a == b ? 1.0 : 0.0)) < 1e-14);
        }
    }
    const Vector ghz = named_state("GHZ-");
    CHECK(ghz(basis_index(0, 0, 0)).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(ghz(basis_index(1, 1, 1)).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
    for (const char* s : {"D0", "D1", "psi0_1", "psi0_2", "psi0_3", "psi1_1", "psi1_2", "psi1_3", "0r1", "+-r"}) {
        CHECK(named_state(s).norm() == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(named_state("W7"), InvalidInput);
}

TEST_CASE("effective Hamiltonians carry the quoted couplings") {
    const double o2 = mhz(0.04);
    const Operator ep0 = build_effective_hamiltonian(params(PumpVariant::EP0));
    CHECK(named_state("D0").dot(ep0 * named_state("000")).real() == doctest::Approx(std::sqrt(3.0) * o2 / 2));
    CHECK(named_state("psi0_2").dot(ep0 * named_state("W0'")).real() == doctest::Approx(-std::sqrt(3.0) * o2 / 4));
    CHECK(named_state("psi0_1").dot(ep0 * named_state("W0''")).real() == doctest::Approx(-o2 / 2));
    const Operator ep1 = build_effective_hamiltonian(params(PumpVariant::EP1));
    CHECK(named_state("D1").dot(ep1 * named_state("111")).real() == doctest::Approx(std::sqrt(3.0) * o2 / 2));
    const Operator sep = build_effective_hamiltonian(params(PumpVariant::SEplus));
    CHECK(std::abs(named_state("r--").dot(sep * named_state("+--"))) == doctest::Approx(o2 / std::sqrt(2.0)));
    for (auto v : kAllVariants) CHECK(is_hermitian(build_effective_hamiltonian(params(v))));
}

TEST_CASE("dark states are annihilated") {
    auto norm_of = [](PumpVariant v, const char* s) {
        return (build_effective_hamiltonian(params(v)) * named_state(s)).norm() / params(v).omega2;
    };
    CHECK(norm_of(PumpVariant::EP0, "W0") < 1e-14);
    CHECK(norm_of(PumpVariant::EP1, "W1") < 1e-14);
    CHECK(norm_of(PumpVariant::SEplus, "GHZ-") < 1e-14);
    CHECK(norm_of(PumpVariant::SE0, "W0") < 1e-14);
}

TEST_CASE("EP0 leaves states with two or more atoms in 1 untouched") {
    const Operator h = build_effective_hamiltonian(params(PumpVariant::EP0));
    for (const char* s : {"110", "101", "011", "111"}) CHECK((h * named_state(s)).norm() == 0.0);
}

TEST_CASE("effective Hamiltonians never reach doubly excited states") {
    for (auto v : kAllVariants) {
        const Operator h = build_effective_hamiltonian(params(v));
        double worst = 0.0;
        for (int a = 0; a < kDim; ++a) {
            for (int b = 0; b < kDim; ++b) {
                if (rydberg_count(a) >= 2 || rydberg_count(b) >= 2) worst = std::max(worst, std::abs(h(a, b)));
            }
        }
        CHECK(worst == 0.0);
    }
}

TEST_CASE("Zeno projection of the static-frame drives reproduces the closed forms") {
    const VdwParams vdw = default_vdw();
    for (auto v : kAllVariants) {
        const LaserParams p = params(v);
        const Operator full = build_full_hamiltonian(p, vdw, Frame::Static, 0.0);
        const Operator w = weak_raising_part(p, true);
        const Operator h_weak = w + dagger(w);
        const Operator h_strong = full - h_weak;
        const Operator z = zeno_project(h_strong, h_weak);
        INFO(to_string(v));
        CHECK(max_abs(z - build_effective_hamiltonian(p)) < 1e-10 * p.omega2);
    }
}

TEST_CASE("zeno_project edge cases") {
    const Operator hw = weak_coupling(1.0, kG0);
    CHECK(max_abs(zeno_project(Operator::Zero(kDim, kDim), hw) - hw) == 0.0);
    CHECK_THROWS_AS(zeno_project(identity(kDim), hw), NumericalError);
    CHECK_THROWS_AS(zeno_project(identity(3), hw), DimensionMismatch);
}

TEST_CASE("full interaction-frame Hamiltonian at t = 0") {
    const LaserParams p = params(PumpVariant::EP0);
    const VdwParams vdw = default_vdw();
    const Operator h = build_full_hamiltonian(p, vdw, Frame::Interaction, 0.0);
    CHECK(h(basis_index(kRyd, 0, 0), basis_index(1, 0, 0)).real() == doctest::Approx(p.omega1 / 2));
    CHECK(h(basis_index(kRyd, 0, 0), basis_index(0, 0, 0)).real() == doctest::Approx(p.omega2 / 2));
    CHECK(h(basis_index(kRyd, kRyd, 0), basis_index(kRyd, kRyd, 0)).real() == doctest::Approx(vdw.urr));
    CHECK(h(basis_index(kRyd, kRyd, kRyd), basis_index(kRyd, kRyd, kRyd)).real() == doctest::Approx(3 * vdw.urr));
    for (double t : {0.0, 1.7e-9, 3.3e-7}) {
        CHECK(is_hermitian(build_full_hamiltonian(p, vdw, Frame::Interaction, t)));
        CHECK(is_hermitian(build_full_hamiltonian(p, vdw, Frame::Static, t, true)));
    }
}

TEST_CASE("static and interaction frames give identical populations") {
    LaserParams p = params(PumpVariant::EP0);
    p.omega2 = 1.0;
    p.omega1 = 20.0;
    p.delta = 200.0;
    const VdwParams v = VdwParams::from_urr(p.delta, 5.0);
    const Operator rho0 = projector(named_state("000"));
    RkOptions rk;
    rk.rel_tol = 1e-10;
    rk.abs_tol = 1e-12;
    rk.samples = 10;
    const double duration = M_PI / p.omega2;
    const Trajectory a = propagate_timedep(
        rho0, [&](double t) { return build_full_hamiltonian(p, v, Frame::Interaction, t); }, {}, duration, rk);
    const Trajectory b = propagate_timedep(
        rho0, [&](double t) { return build_full_hamiltonian(p, v, Frame::Static, t, true); }, {}, duration, rk);
    double worst = 0.0;
    for (size_t i = 0; i < a.states.size(); ++i) {
        for (int k = 0; k < kDim; ++k) worst = std::max(worst, std::abs(a.states[i](k, k) - b.states[i](k, k)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("pi pulses of the pump variants") {
    const double o2 = mhz(0.04);
    auto transfer = [](PumpVariant v, const char* from, const char* to, double t) {
        const Operator h = build_effective_hamiltonian(params(v));
        const Trajectory tr = propagate_const(projector(named_state(from)), h, {}, t);
        return observe(tr.final_state(), named_state(to));
    };
    CHECK(transfer(PumpVariant::EP1, "111", "D1", M_PI / (std::sqrt(3.0) * o2)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(transfer(PumpVariant::EP0, "000", "D0", M_PI / (std::sqrt(3.0) * o2)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(transfer(PumpVariant::SE0, "011", "r11", M_PI / o2) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("two-photon reduction") {
    TwoPhotonParams tp{mhz(93.42), mhz(0.856), mhz(1000.0)};
    const auto [o1, o2] = two_photon_reduce(tp, mhz(200.0));
    CHECK(std::abs(o1 / mhz(4.0) - 1.0) < 0.005);
    CHECK(std::abs(o2 / mhz(0.04) - 1.0) < 0.005);
    const auto zero = two_photon_reduce({0.0, mhz(1.0), mhz(1000.0)}, mhz(200.0));
    CHECK(zero.first == 0.0);
    CHECK(zero.second == 0.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int k = 0; k < 10; ++k) {
        const double a = u(rng), b = u(rng), d1 = 100 * u(rng), d = 10 * u(rng);
        const auto r = two_photon_reduce({a, b, d1}, d);
        CHECK(r.first == doctest::Approx((2 * d1 + d) * a * a / (4 * d1 * (d1 + d))).epsilon(1e-14));
        CHECK(r.second == doctest::Approx(a * b / (2 * d1)).epsilon(1e-14));
    }
}

TEST_CASE("van der Waals parameters") {
    const VdwParams v = VdwParams::from_c6(mhz(3000.0), 2.0);
    CHECK(v.urr == doctest::Approx(mhz(3000.0) / 64.0).epsilon(1e-12));
    const VdwParams d = default_vdw();
    CHECK(d.urr == doctest::Approx(mhz(200.0)));
    CHECK(d.urr == doctest::Approx(d.c6 / std::pow(d.r0, 6)).epsilon(1e-9));
    CHECK_THROWS_AS(VdwParams::from_c6(1.0, 0.0), InvalidInput);
}

TEST_CASE("laser parameter validation") {
    LaserParams p;
    CHECK(p.validate());
    p.omega2 = 0.05 * p.omega1;
    CHECK_FALSE(p.validate());
    p.omega1 = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    CHECK(pump_variant_from_string("SEplus") == PumpVariant::SEplus);
    CHECK_THROWS_AS(pump_variant_from_string("XX"), InvalidInput);
}
