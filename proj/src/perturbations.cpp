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

#include "flsim/perturbations.hpp"

#include <cmath>
#include <random>

#include "flsim/errors.hpp"

namespace flsim {

PulseShape PulseShape::rectangular() { return PulseShape{}; }

PulseShape PulseShape::gaussian(double alpha, double omega0) {
    return PulseShape{PulseKind::Gaussian, omega0, gaussian_sigma(alpha, omega0), alpha};
}

double PulseShape::envelope(double t) const {
    if (kind == PulseKind::Rectangular) return 1.0;
    const double x = (t - 2.0 * sigma) / sigma;
    return std::exp(-0.5 * x * x);
}

double gaussian_sigma(double alpha, double omega0) {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw InvalidInput("gaussian_sigma: omega0 must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidInput("gaussian_sigma: alpha must be positive");
    return std::sqrt(M_PI) / (std::sqrt(2.0) * alpha * omega0 * std::erf(std::sqrt(2.0)));
}

double NoiseTrace::phase(double t) const {
    if (phi.empty()) return 0.0;
    if (t <= 0.0) return phi.front();
    const double x = t / dt;
    const auto k = static_cast<size_t>(x);
    if (k + 1 >= phi.size()) {
        if (t > duration() * (1.0 + 1e-12)) throw CoverageError("noise trace shorter than the requested time");
        return phi.back();
    }
    const double w = x - static_cast<double>(k);
    return (1.0 - w) * phi[k] + w * phi[k + 1];
}

NoiseTrace phase_noise_trace(const PhaseNoiseSpec& spec, double duration) {
    if (!(duration > 0.0)) throw InvalidInput("phase_noise_trace: duration must be positive");
    if (spec.h0 < 0.0 || !(spec.f_max > 0.0) || spec.n_components < 1) {
        throw InvalidInput("phase_noise_trace: invalid spectrum parameters");
    }
    NoiseTrace tr;
    tr.spec = spec;
    tr.dt = spec.dt();
    const auto n = static_cast<size_t>(std::ceil(duration / tr.dt - 1e-9)) + 1;
    tr.phi.assign(n, 0.0);
    tr.dv.assign(n, 0.0);
    if (spec.h0 == 0.0) return tr;

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    const double df = spec.df();
    const double amp_dv = 2.0 * std::sqrt(spec.h0 * df);
    for (int j = 1; j <= spec.n_components; ++j) {
        const double f = j * df;
        const double ph = uni(rng);
        const double amp_phi = amp_dv / f;
        for (size_t k = 0; k < n; ++k) {
            const double arg = 2.0 * M_PI * f * (static_cast<double>(k) * tr.dt) + ph;
            tr.phi[k] += amp_phi * std::cos(arg);
            tr.dv[k] -= amp_dv * std::sin(arg);
        }
    }
    return tr;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void ImperfectionSpec::validate() const {
    if (!std::isfinite(delta_r) || !std::isfinite(delta_t_fraction) || !std::isfinite(delta_freq)) {
        throw InvalidInput("imperfection parameters must be finite");
    }
    if (std::abs(delta_t_fraction) > 0.5) throw InvalidInput("timing error fraction must satisfy |dt| <= 0.5");
}

VdwParams distance_shift(double delta_r_nm, const VdwParams& v, bool exact) {
    const double dr = 1e-3 * delta_r_nm;
    if (std::abs(dr) >= v.r0) throw InvalidInput("distance offset must be smaller than R0");
    VdwParams out = v;
    if (exact) {
        out.urr = v.c6 / std::pow(v.r0 + dr, 6);
    } else {
        out.urr = v.urr * (1.0 - 6.0 * dr / v.r0);
    }
    return out;
}

Drive apply_phase_noise(const Drive& drive, std::shared_ptr<const NoiseTrace> trace, double duration) {
    if (!trace) throw InvalidInput("apply_phase_noise: missing trace");
    if (trace->duration() < duration * (1.0 - 1e-12)) {
        throw CoverageError("apply_phase_noise: trace shorter than the step");
    }
    Drive out = drive;
    auto base = drive.envelope;
    out.envelope = [base, trace](double t) -> cplx {
        const cplx s = base ? base(t) : cplx(1.0);
        return s * std::exp(I * trace->phase(t));
    };
    return out;
}

Protocol apply_imperfections(const Protocol& protocol, const ImperfectionSpec& spec) {
    spec.validate();
    if (spec.is_zero()) return protocol;
    Protocol out = protocol;
    if (spec.delta_r != 0.0) {
        ModelOptions m = protocol.model;
        m.full_hamiltonian = true;
        m.vdw = distance_shift(spec.delta_r, protocol.model.vdw, spec.exact_distance);
        for (auto& step : out.steps) {
            if (step.kind == StepKind::Coherent) {
                step = make_coherent_step(step.variant, protocol.laser, protocol.decay, m);
            }
        }
        out.model = m;
    }
    for (auto& step : out.steps) {
        if (step.kind != StepKind::Coherent) continue;
        step.duration *= 1.0 + spec.delta_t_fraction;
        step.detuning += spec.delta_freq;
    }
    return out;
}

}  // namespace flsim
