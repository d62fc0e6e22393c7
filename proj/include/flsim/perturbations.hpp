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

#include "flsim/atoms.hpp"
#include "flsim/dynamics.hpp"
#include "flsim/protocols.hpp"
#include "flsim/pulses.hpp"

namespace flsim {

struct ImperfectionSpec {
    double delta_r = 0.0;            // nm, static offset of the interatomic distance
    double delta_t_fraction = 0.0;   // relative error of every coherent-step duration
    double delta_freq = 0.0;         // rad/s, detuning of the weak field
    bool exact_distance = false;     // C6 / (R0 + dR)^6 instead of the linearized shift

    bool is_zero() const { return delta_r == 0.0 && delta_t_fraction == 0.0 && delta_freq == 0.0; }
    void validate() const;
};

/// U_rr -> U_rr (1 - 6 dR / R0), or the exact power law.
VdwParams distance_shift(double delta_r_nm, const VdwParams& v, bool exact = false);

/// Multiply the raising part by e^{i phi(t)}. The trace must cover duration.
Drive apply_phase_noise(const Drive& drive, std::shared_ptr<const NoiseTrace> trace, double duration);

/// Timing error scales coherent durations; a distance offset rebuilds the
/// coherent steps from full static-frame Hamiltonians with the shifted
/// U_rr; a frequency offset adds delta_freq * N_r to coherent steps.
Protocol apply_imperfections(const Protocol& protocol, const ImperfectionSpec& spec);

}  // namespace flsim
