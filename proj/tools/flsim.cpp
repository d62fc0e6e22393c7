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


#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "flsim/errors.hpp"
#include "flsim/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw flsim::ConfigError("cannot read config file '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative Floquet-Lindblad simulator for GHZ/W interconversion of three Rydberg atoms"};
    app.set_version_flag("--version", std::string(FLSIM_VERSION));

    std::string experiment;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool full = false;
    std::string pulse;

    app.add_option("experiment", experiment, "Experiment to run")
        ->required()
        ->check(CLI::IsMember(flsim::experiment_names()));
    app.add_option("--config", config_path, "JSON configuration (frequencies in MHz)");
    app.add_option("--out", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--full-hamiltonian", full, "Use full static-frame operators");
    app.add_option("--pulse", pulse, "Weak-field pulse shape")->check(CLI::IsMember({"rect", "gauss"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    flsim::CliOverrides ov;
    if (*seed_opt) ov.seed = seed;
    if (*threads_opt) {
        ov.threads = threads;
    } else if (const char* env = std::getenv("FLSIM_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1) {
            std::cerr << "error: FLSIM_THREADS must be a positive integer\n";
            return 1;
        }
        ov.threads = static_cast<int>(n);
    }
    ov.full_hamiltonian = full;
    if (!pulse.empty()) ov.pulse = pulse == "rect" ? flsim::PulseKind::Rectangular : flsim::PulseKind::Gaussian;
    if (!out_dir.empty()) ov.out_dir = out_dir;

    flsim::ExperimentConfig config;
    try {
        config = flsim::load_config(experiment, config_path.empty() ? std::string() : read_file(config_path), ov);
    } catch (const flsim::InvalidInput& e) {
        std::cerr << "error: invalid configuration: " << e.what() << '\n';
        return 1;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        const flsim::ExperimentOutput out = flsim::run_experiment(config);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        flsim::write_outputs(config, out, wall);
        for (const auto& [name, value] : out.scalars) std::cout << name << " = " << value << '\n';
        std::cout << "wrote " << out.tables.size() << " table(s) to " << config.output_path << " in " << wall
                  << " s\n";
    } catch (const flsim::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
