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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flsim/atoms.hpp"
#include "flsim/dissipation.hpp"
#include "flsim/dynamics.hpp"
#include "flsim/errors.hpp"
#include "flsim/perturbations.hpp"
#include "flsim/protocols.hpp"

namespace flsim {

/// Raised for malformed or inconsistent configuration documents.
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

const std::vector<std::string>& experiment_names();

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool full_hamiltonian = false;
    std::optional<PulseKind> pulse;
    std::optional<std::string> out_dir;
};

/// Parsed configuration. Frequencies are stored in rad/s.
struct ExperimentConfig {
    std::string experiment;
    LaserParams laser;
    DecayParams decay;
    VdwParams vdw = default_vdw();
    ModelOptions model;
    std::vector<PulseKind> pulses;  // empty: the experiment's default
    std::vector<ProtocolLabel> protocols{ProtocolLabel::ConversionI, ProtocolLabel::ConversionII};
    std::string initial_state;  // empty: the protocol's source state

    int n_cycles = 18;
    int samples_per_step = 8;
    std::uint64_t seed = 1;
    int n_seeds = 5;
    int threads = 1;
    RkOptions rk;

    std::vector<double> h0_values{400.0, 2000.0};
    double f_max = 10e6;
    int n_components = 500;
    NoiseMode noise_mode = NoiseMode::PerStep;
    int rabi_seeds = 100;
    double rabi_periods = 5.0;

    ImperfectionSpec imperfection;
    std::vector<double> ratios{0.005, 0.01, 0.025, 0.05, 0.08};
    std::vector<double> delta_r_grid{-200.0, -100.0, 0.0, 100.0, 200.0};
    std::vector<double> delta_t_grid{-0.2, -0.1, 0.0, 0.1, 0.2};
    std::vector<double> detunings{-khz(30.0), 0.0, khz(30.0)};
    int max_cycles = 45;

    Frame frame = Frame::Static;
    bool retain_stark = false;
    double validate_omega1_over_omega2 = 100.0;
    double validate_delta_over_omega1 = 50.0;
    int validate_samples = 200;

    double decay_window = 12.0;
    int decay_samples = 240;

    std::string output_path = "results";
};

/// Parse a JSON document (may be empty for all defaults). Unknown keys,
/// wrong types and out-of-range values raise ConfigError.
ExperimentConfig load_config(const std::string& experiment, const std::string& json_text,
                             const CliOverrides& overrides = {});

/// Canonical JSON of the resolved configuration (frequencies in MHz).
std::string canonical_config(const ExperimentConfig& c);

struct ResultTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::string> units;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row);
};

struct ExperimentOutput {
    std::vector<ResultTable> tables;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<std::pair<std::string, std::string>> notes;
};

ExperimentOutput run_experiment(const ExperimentConfig& c);

/// CSV text: a row of names, a row of units, then numbers at 17 digits.
std::string to_csv(const ResultTable& t);

/// Writes every table plus <experiment>.json into c.output_path.
void write_outputs(const ExperimentConfig& c, const ExperimentOutput& out, double wall_seconds);

}  // namespace flsim
