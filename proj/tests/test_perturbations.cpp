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
#include <fstream>
#include <sstream>

#include "flsim/errors.hpp"
#include "flsim/perturbations.hpp"
#include "support.hpp"

using namespace flsim;
using flsim::testing::max_abs;

namespace {

// Two-sided periodogram |X_j|^2 dt / N of the first N samples at bins 1..N/2.
std::vector<double> periodogram(const std::vector<double>& x, size_t n, double dt) {
    std::vector<cplx> twiddle(n);
    for (size_t m = 0; m < n; ++m) twiddle[m] = std::exp(cplx(0.0, -2.0 * M_PI * double(m) / double(n)));
    std::vector<double> out(n / 2 + 1, 0.0);
    for (size_t j = 1; j <= n / 2; ++j) {
        cplx acc = 0.0;
        for (size_t k = 0; k < n; ++k) acc += x[k] * twiddle[(j * k) % n];
        out[j] = std::norm(acc) * dt / double(n);
    }
    return out;
}

double band_mean(const std::vector<double>& s, size_t lo, size_t hi) {
    double sum = 0.0;
    for (size_t j = lo; j < hi; ++j) sum += s[j];
    return sum / double(hi - lo);
}

}  // namespace

TEST_CASE("noise trace sampling grid") {
    PhaseNoiseSpec s;
    CHECK(s.df() == doctest::Approx(20e3));
    CHECK(s.dt() == doctest::Approx(50e-9));
    const NoiseTrace zero = phase_noise_trace(s, 10e-6);
    for (double p : zero.phi) CHECK(p == 0.0);
    CHECK(zero.duration() >= 10e-6 * (1 - 1e-12));
    CHECK_THROWS_AS(phase_noise_trace(s, 0.0), InvalidInput);
}

TEST_CASE("noise traces are reproducible") {
    PhaseNoiseSpec s;
    s.h0 = 400.0;
    s.seed = 99;
    const NoiseTrace a = phase_noise_trace(s, 20e-6), b = phase_noise_trace(s, 20e-6);
    CHECK(a.phi == b.phi);
    s.seed = 100;
    CHECK(phase_noise_trace(s, 20e-6).phi != a.phi);
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("frequency-noise periodogram is flat at h0") {
    PhaseNoiseSpec s;
    s.h0 = 400.0;
    const size_t n = 2 * static_cast<size_t>(s.n_components);
    const double period = 1.0 / s.df();
    std::vector<double> mean(n / 2 + 1, 0.0);
    const int seeds = 100;
    for (int k = 0; k < seeds; ++k) {
        s.seed = derive_seed(7, k);
        const NoiseTrace tr = phase_noise_trace(s, period);
        REQUIRE(tr.dv.size() >= n);
        const auto p = periodogram(tr.dv, n, tr.dt);
        for (size_t j = 0; j < p.size(); ++j) mean[j] += p[j] / seeds;
    }
    const double overall = band_mean(mean, 1, n / 2);
    CHECK(overall == doctest::Approx(s.h0).epsilon(0.2));
    const double d1 = band_mean(mean, 1, 10), d2 = band_mean(mean, 10, 100), d3 = band_mean(mean, 100, n / 4 + 1);
    for (double r : {d1 / d2, d2 / d3, d1 / d3}) {
        CHECK(r > 0.7);
        CHECK(r < 1.3);
    }
}

TEST_CASE("phase interpolation and coverage") {
    PhaseNoiseSpec s;
    s.h0 = 2000.0;
    s.seed = 3;
    const NoiseTrace tr = phase_noise_trace(s, 1e-6);
    CHECK(tr.phase(tr.dt) == doctest::Approx(tr.phi[1]));
    CHECK(tr.phase(1.5 * tr.dt) == doctest::Approx(0.5 * (tr.phi[1] + tr.phi[2])));
    CHECK_THROWS_AS(tr.phase(2e-6), CoverageError);
    auto ptr = std::make_shared<const NoiseTrace>(tr);
    const Drive d{Operator::Zero(kDim, kDim), Operator::Zero(kDim, kDim), nullptr};
    CHECK_THROWS_AS(apply_phase_noise(d, ptr, 2e-6), CoverageError);
}

TEST_CASE("phase noise keeps the Hamiltonian Hermitian and a zero trace changes nothing") {
    LaserParams p;
    p.variant = PumpVariant::EP0;
    const Operator h = build_effective_hamiltonian(p);
    const Operator w = weak_raising_part(p, false);
    const Drive base{h - w - dagger(w), w, [](double) { return cplx(1.0); }};
    PhaseNoiseSpec s;
    s.h0 = 400.0;
    s.seed = 5;
    const double t = M_PI / (std::sqrt(3.0) * p.omega2);
    auto trace = std::make_shared<const NoiseTrace>(phase_noise_trace(s, t));
    const Drive noisy = apply_phase_noise(base, trace, t);
    for (double x : {0.0, 0.3 * t, 0.77 * t, t}) {
        const cplx e = noisy.envelope(x);
        CHECK(std::abs(e) == doctest::Approx(1.0).epsilon(1e-14));
        const Operator hx = noisy.h0 + e * w + std::conj(e) * dagger(w);
        CHECK(max_abs(hx - hx.adjoint()) < 1e-12 * max_abs(hx));
    }
    s.h0 = 0.0;
    auto flat = std::make_shared<const NoiseTrace>(phase_noise_trace(s, t));
    const Operator rho0 = projector(named_state("000"));
    const Trajectory a = propagate_drive(rho0, base, {}, t);
    const Trajectory b = propagate_drive(rho0, apply_phase_noise(base, flat, t), {}, t);
    CHECK(max_abs(a.final_state() - b.final_state()) == 0.0);
}

TEST_CASE("noisy Rabi oscillations stay normalized and dephase on average") {
    LaserParams p;
    p.variant = PumpVariant::EP0;
    const Operator h = build_effective_hamiltonian(p);
    const Operator w = weak_raising_part(p, false);
    const Drive base{h - w - dagger(w), w, [](double) { return cplx(1.0); }};
    const double rate = std::sqrt(3.0) * p.omega2;
    const double t = 5.0 * 2.0 * M_PI / rate;
    const Operator rho0 = projector(named_state("000"));
    PhaseNoiseSpec s;
    s.h0 = 400.0;
    const int seeds = 10;
    double mean_end = 0.0;
    for (int k = 0; k < seeds; ++k) {
        s.seed = derive_seed(11, k);
        auto trace = std::make_shared<const NoiseTrace>(phase_noise_trace(s, t));
        RkOptions rk;
        for (size_t i = 1; i + 1 < trace->phi.size(); ++i) rk.breakpoints.push_back(double(i) * trace->dt);
        const Trajectory tr = propagate_drive(rho0, apply_phase_noise(base, trace, t), {}, t, rk);
        CHECK(tr.trace_drift() < 1e-10);
        mean_end += observe(tr.final_state(), named_state("000")) / seeds;
    }
    // A noiseless drive returns fully to 000 after whole periods.
    CHECK(mean_end < 1.0 - 1e-6);
    CHECK(mean_end > 0.5);
}

TEST_CASE("distance shift") {
    const VdwParams v = default_vdw();
    const VdwParams s = distance_shift(std::sqrt(2.0) * 86.6, v);
    CHECK(std::abs(s.urr - v.urr) / mhz(1.0) == doctest::Approx(28.0).epsilon(0.02));
    CHECK(distance_shift(0.0, v).urr == v.urr);
    const double lin = distance_shift(50.0, v).urr, ex = distance_shift(50.0, v, true).urr;
    CHECK(std::abs(lin - ex) / v.urr < 0.03);
    CHECK(ex == doctest::Approx(v.c6 / std::pow(v.r0 + 0.05, 6)));
    CHECK_THROWS_AS(distance_shift(6000.0, v), InvalidInput);
}

TEST_CASE("Gaussian pulse width") {
    const double o0 = mhz(0.072);
    CHECK(gaussian_sigma(1.0, o0) * 1e6 == doctest::Approx(2.90).epsilon(0.01));
    CHECK(gaussian_sigma(std::sqrt(3.0), o0) == doctest::Approx(gaussian_sigma(1.0, o0) / std::sqrt(3.0)));
    CHECK(gaussian_sigma(1.0, 2 * o0) == doctest::Approx(gaussian_sigma(1.0, o0) / 2));
    CHECK_THROWS_AS(gaussian_sigma(1.0, 0.0), InvalidInput);
    for (double alpha : {1.0, std::sqrt(2.0), std::sqrt(3.0)}) {
        const PulseShape g = PulseShape::gaussian(alpha, o0);
        // Composite Simpson over [0, 4 sigma].
        const int n = 2000;
        const double h = g.support() / n;
        double sum = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            sum += w * alpha * o0 * g.envelope(k * h);
        }
        CHECK(sum * h / 3.0 == doctest::Approx(M_PI).epsilon(1e-6));
    }
    CHECK(PulseShape::rectangular().envelope(123.0) == 1.0);
}

TEST_CASE("imperfections reshape the protocol") {
    const Protocol p = make_conversion_I(LaserParams{}, DecayParams{});
    const Protocol same = apply_imperfections(p, ImperfectionSpec{});
    for (size_t k = 0; k < 6; ++k) {
        CHECK(same.steps[k].duration == p.steps[k].duration);
        CHECK(max_abs(same.steps[k].hamiltonian() - p.steps[k].hamiltonian()) == 0.0);
    }
    ImperfectionSpec t;
    t.delta_t_fraction = 0.1;
    const Protocol q = apply_imperfections(p, t);
    for (size_t k = 0; k < 6; ++k) {
        const double f = p.steps[k].kind == StepKind::Coherent ? 1.1 : 1.0;
        CHECK(q.steps[k].duration == doctest::Approx(f * p.steps[k].duration));
    }
    ImperfectionSpec d;
    d.delta_freq = khz(30.0);
    const Protocol r = apply_imperfections(p, d);
    const Operator diff = r.steps[0].hamiltonian() - p.steps[0].hamiltonian();
    CHECK(max_abs(diff - khz(30.0) * rydberg_number()) < 1e-6);
    ImperfectionSpec dr;
    dr.delta_r = -100.0;
    const Protocol s = apply_imperfections(p, dr);
    const double shift = distance_shift(-100.0, default_vdw()).urr - mhz(200.0);
    const int rr0 = basis_index(kRyd, kRyd, 0);
    CHECK(s.steps[0].hamiltonian()(rr0, rr0).real() == doctest::Approx(shift));
    ImperfectionSpec bad;
    bad.delta_t_fraction = 0.7;
    CHECK_THROWS_AS(apply_imperfections(p, bad), InvalidInput);
}

TEST_CASE("resonant-field detuning slows conversion I") {
    const Protocol p = make_conversion_I(LaserParams{}, DecayParams{});
    ImperfectionSpec d;
    d.delta_freq = khz(30.0);
    const Protocol q = apply_imperfections(p, d);
    const Matrix pp = period_propagator(p), pq = period_propagator(q);
    Vector a = vectorize(projector(named_state("GHZ-"))), b = a;
    const Vector w0 = named_state("W0");
    int first = -1;
    double p18 = 0.0, q18 = 0.0;
    for (int c = 1; c <= 27; ++c) {
        a = pp * a;
        b = pq * b;
        const double pb = observe(devectorize(b), w0);
        if (c == 18) {
            p18 = observe(devectorize(a), w0);
            q18 = pb;
        }
        if (first < 0 && pb >= 0.99) first = c;
    }
    CHECK(q18 < p18);
    CHECK(first > 18);
    CHECK(first <= 27);
}

static std::vector<std::vector<double>> golden_sweep() {
    std::ifstream f(FLSIM_GOLDEN_DIR "/robustness-sweep.csv");
    REQUIRE(f.good());
    std::string line;
    std::getline(f, line);
    std::getline(f, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        std::stringstream ss(line);
        std::vector<double> row;
        for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

TEST_CASE("Gaussian pulses are at least as robust as rectangular ones") {
    // Columns: protocol, pulse, delta_r_nm, delta_t_fraction, population.
    const auto rows = golden_sweep();
    int compared = 0;
    for (const auto& gp : rows) {
        if (gp[1] != 1.0) continue;
        for (const auto& rp : rows) {
            if (rp[1] != 0.0 || rp[0] != gp[0] || rp[2] != gp[2] || rp[3] != gp[3]) continue;
            CAPTURE(gp[0]);
            CAPTURE(gp[2]);
            CAPTURE(gp[3]);
            CHECK(gp[4] >= rp[4] - 0.005);
            ++compared;
        }
    }
    CHECK(compared == 50);
}

TEST_CASE("distance offset corner matches the golden sweep value") {
    double golden = -1.0;
    for (const auto& row : golden_sweep()) {
        if (row[0] == 1 && row[1] == 0 && row[2] == -200 && row[3] == 0) golden = row[4];
    }
    REQUIRE(golden > 0.0);
    ModelOptions m;
    m.full_hamiltonian = true;
    ImperfectionSpec dr;
    dr.delta_r = -200.0;
    const Protocol p = apply_imperfections(make_conversion_I(LaserParams{}, DecayParams{}, m), dr);
    const Trajectory tr = run_cycles(projector(named_state("GHZ-")), p, 18);
    CHECK(std::abs(observe(tr.final_state(), named_state("W0")) - golden) < 0.02);
}
