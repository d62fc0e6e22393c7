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

#pragma once

#include <cstdint>
#include <vector>

#include "flsim/atoms.hpp"

namespace flsim {

enum class PulseKind { Rectangular, Gaussian };

/// Time profile of the weak drive. Gaussian pulses live on [0, 4 sigma]
/// and peak at omega0.
struct PulseShape {
    PulseKind kind = PulseKind::Rectangular;
    double omega0 = 0.0;
    double sigma = 0.0;
    double alpha = 1.0;

    static PulseShape rectangular();
    /// sigma from the pi-area condition over [0, 4 sigma].
    static PulseShape gaussian(double alpha, double omega0);

    /// Envelope relative to the peak amplitude.
    double envelope(double t) const;
    double support() const { return 4.0 * sigma; }
};

/// sigma = sqrt(pi) / (sqrt(2) alpha omega0 erf(sqrt 2)).
double gaussian_sigma(double alpha, double omega0);

/// White frequency noise S_dv = h0 (Hz^2/Hz), i.e. S_phi(f) = h0 / f^2,
/// sampled with n_components cosines at f_j = j * f_max / n_components.
struct PhaseNoiseSpec {
    double h0 = 0.0;
    double f_max = 10e6;
    int n_components = 500;
    std::uint64_t seed = 0;

    double df() const { return f_max / n_components; }
    /// Nyquist spacing 1 / (M df) with M = 2 n_components.
    double dt() const { return 1.0 / (2.0 * n_components * df()); }
};

struct NoiseTrace {
    PhaseNoiseSpec spec;
    double dt = 0.0;
    std::vector<double> phi;  // rad
    std::vector<double> dv;   // Hz, (1 / 2 pi) d phi / dt

    double duration() const { return dt * static_cast<double>(phi.empty() ? 0 : phi.size() - 1); }
    /// Linear interpolation of phi between samples.
    double phase(double t) const;
};

NoiseTrace phase_noise_trace(const PhaseNoiseSpec& spec, double duration);

/// Independent stream derived from a master seed and an index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace flsim
