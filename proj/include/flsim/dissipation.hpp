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

#include <map>
#include <string>
#include <vector>

#include "flsim/atoms.hpp"
#include "flsim/linalg.hpp"

namespace flsim {

/// Rates of the engineered emission. Intermediate-state decay rates gamma_i
/// and dressing Rabi frequencies omega_di give Gamma_i = omega_di^2 / gamma_i.
struct DecayParams {
    double gamma1 = mhz(6.06);
    double gamma2 = mhz(5.75);
    double gamma3 = mhz(6.06);
    double omega_d1 = 0.2 * mhz(6.06);
    double omega_d2 = 0.2 * mhz(5.75);
    double omega_d3 = 0.2 * mhz(6.06);
    double gamma_r = khz(0.28);

    double Gamma1() const;
    double Gamma2() const;
    /// Recycling rate tied to Gamma2: Gamma2 * gamma3 / gamma2.
    double Gamma3() const;

    /// Throws on negative or non-finite rates. Returns false when some
    /// omega_di / gamma_i exceeds 0.2.
    bool validate() const;
};

enum class ChannelKind { CD, UCD, NaturalRydberg };

std::string to_string(ChannelKind k);

struct EngineeredChannelSpec {
    ChannelKind kind = ChannelKind::CD;
    /// Target level -> fraction of the total rate. Empty means the default
    /// branching: CD {0: 1}, UCD and NaturalRydberg {0: 1/2, 1: 1/2}.
    std::map<int, double> branching;

    std::map<int, double> resolved_branching() const;
};

/// Per-atom channels on the 27-dimensional space.
std::vector<JumpChannel> effective_channels(const EngineeredChannelSpec& spec, const DecayParams& d);
std::vector<JumpChannel> effective_channels(ChannelKind kind, const DecayParams& d);

/// Single-atom master equation on an extended level set.
struct SingleAtomModel {
    std::vector<std::string> levels;
    Operator hamiltonian;
    std::vector<JumpChannel> channels;

    int index(const std::string& level) const;
};

/// Levels {r, p1, 0, 1}: r <-> p1 dressed by omega_d1, p1 decays to 0.
SingleAtomModel full_cd_model(const DecayParams& d);
/// Levels {r, 0, 1}: Gamma1 D[|0><r|].
SingleAtomModel effective_cd_model(const DecayParams& d);
/// Levels {r, p3, p4, 0, 1, alpha} with branching (1/3, 1/2, 1/6) from p3
/// and (1/3, 0, 2/3) from p4.
SingleAtomModel full_ucd_model(const DecayParams& d);
/// Levels {r, 0, 1, alpha} after eliminating p3 and p4.
SingleAtomModel effective_ucd_model(const DecayParams& d);
/// Levels {r, 0, 1}: (Gamma2 / 2) (D[|0><r|] + D[|1><r|]).
SingleAtomModel reduced_ucd_model(const DecayParams& d);

/// Ground population reached from |r> under CD: 1 - exp(-Gamma1 t).
double cd_ground_population(double Gamma1, double t);
/// rho00 + rho11 from |r> under the recycled UCD model.
double ucd_ground_population(double Gamma2, double Gamma3, double t);

/// Shortest t at which the analytic ground population reaches target.
double decay_duration(double target_ground_prob, ChannelKind kind, const DecayParams& d);

}  // namespace flsim
