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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flsim/atoms.hpp"
#include "flsim/dissipation.hpp"
#include "flsim/dynamics.hpp"
#include "flsim/linalg.hpp"
#include "flsim/pulses.hpp"

namespace flsim {

enum class ProtocolLabel { ConversionI, ConversionII };

std::string to_string(ProtocolLabel l);

enum class StepKind { Coherent, Dissipative };

/// One Floquet step. Coherent steps evolve under
/// H(t) = h_rest + detuning * N_r + s(t) W + conj(s(t)) W^dag
/// where W is the weak-drive raising part at the pulse reference amplitude
/// and s(t) the pulse envelope (times e^{i phi(t)} under phase noise).
struct ProtocolStep {
    StepKind kind = StepKind::Coherent;
    std::string label;
    PumpVariant variant = PumpVariant::EP0;
    ChannelKind channel = ChannelKind::CD;

    Operator h_rest;
    Operator raising;
    PulseShape pulse;
    double detuning = 0.0;

    std::vector<JumpChannel> channels;
    std::vector<JumpChannel> always_on;
    double duration = 0.0;

    /// Static Hamiltonian of a rectangular, noiseless coherent step (zero for
    /// dissipative steps).
    Operator hamiltonian() const;
    std::vector<JumpChannel> all_channels() const;
    bool constant_generator() const { return kind == StepKind::Dissipative || pulse.kind == PulseKind::Rectangular; }
};

enum class NoiseMode {
    /// Fresh trace for every coherent step, seeded from (seed, cycle, step).
    PerStep,
    /// One trace over the whole run, sampled at the global time.
    Continuous,
};

/// How the step generators are built.
struct ModelOptions {
    bool full_hamiltonian = false;
    VdwParams vdw = default_vdw();
    PulseKind pulse = PulseKind::Rectangular;
    double omega0 = mhz(0.072);
    /// Dissipative step lengths in units of 1/Gamma1 and 1/Gamma2.
    double tau1_factor = 4.6;
    double tau2_factor = 9.75;
    bool natural_decay = true;
    EngineeredChannelSpec natural_branching{ChannelKind::NaturalRydberg, {}};
};

struct Protocol {
    ProtocolLabel label = ProtocolLabel::ConversionI;
    std::vector<ProtocolStep> steps;
    std::optional<PhaseNoiseSpec> noise;
    NoiseMode noise_mode = NoiseMode::PerStep;

    // Parameters the steps were built from.
    LaserParams laser;
    DecayParams decay;
    ModelOptions model;

    double period() const;
    double coherent_time() const;
};

ProtocolStep make_coherent_step(PumpVariant v, const LaserParams& p, const DecayParams& d, const ModelOptions& m);
ProtocolStep make_dissipative_step(ChannelKind k, const DecayParams& d, const ModelOptions& m);

/// EP1, CD, SE0, CD, EP0, UCD.
Protocol make_conversion_I(const LaserParams& p, const DecayParams& d, const ModelOptions& m = {});
/// SE0, UCD, SE1, UCD, SE+, UCD.
Protocol make_conversion_II(const LaserParams& p, const DecayParams& d, const ModelOptions& m = {});
Protocol make_conversion(ProtocolLabel l, const LaserParams& p, const DecayParams& d, const ModelOptions& m = {});

/// Target and canonical initial state of each conversion.
Vector target_state(ProtocolLabel l);
Vector source_state(ProtocolLabel l);

struct RunOptions {
    int samples_per_step = 1;
    PropagatorCache* cache = nullptr;
    RkOptions rk{};
};

/// Steps in order, cycle after cycle. The trajectory starts with rho0 and
/// gains samples_per_step states per step.
Trajectory run_cycles(const Operator& rho0, const Protocol& protocol, int n_cycles, const RunOptions& opts = {});

/// State at the end of each cycle (index 0 is after cycle 1).
std::vector<Operator> cycle_end_states(const Trajectory& traj, const Protocol& protocol, int samples_per_step);

/// Ordered product exp(L6 t6) ... exp(L1 t1).
Matrix period_propagator(const Protocol& protocol, PropagatorCache* cache = nullptr);

struct EffectiveGenerator {
    SuperOperator generator;
    Matrix propagator;
    LogResult log;
};

EffectiveGenerator effective_liouvillian_checked(const Protocol& protocol, PropagatorCache* cache = nullptr,
                                                 const LogOptions& opts = {BranchPolicy::Regularize});
SuperOperator effective_liouvillian(const Protocol& protocol, PropagatorCache* cache = nullptr);

struct SpectrumResult {
    Vector eigenvalues;          // sorted by real part, descending
    Operator steady_state;
    double purity = 0.0;
    double target_population = 0.0;
    double spectral_gap = 0.0;   // |Re lambda_2|
    int zero_modes = 0;          // eigenvalues with |lambda| < 1e-8
    double min_eigenvalue = 0.0; // of the Hermitized steady state before clipping
};

SpectrumResult steady_state_analysis(const SuperOperator& l_eff, const Vector& target);
/// Spectrum of log(P) / T from the eigen-decomposition of the period map P.
/// Same eigenvectors as the effective generator, but conditioned by P
/// rather than by the large rates of nearly vanishing multipliers.
SpectrumResult floquet_steady_state(const Matrix& propagator, double period, const Vector& target);

struct SweepPoint {
    double ratio = 0.0;
    std::optional<SpectrumResult> result;
    std::string error;
};

/// One spectrum per ratio at fixed omega1 (omega2 = ratio * omega1). The
/// effective operators do not depend on omega1, so ratio studies should
/// set m.full_hamiltonian.
std::vector<SweepPoint> sweep_ratio(ProtocolLabel family, const LaserParams& p, const DecayParams& d,
                                    const std::vector<double>& ratios, const ModelOptions& m = {},
                                    int threads = 1);

}  // namespace flsim
