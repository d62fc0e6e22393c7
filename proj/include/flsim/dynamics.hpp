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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "flsim/linalg.hpp"

namespace flsim {

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<double> samples;

    /// n equal intervals on [t_start, t_end], n + 1 samples.
    static TimeGrid uniform(double t_start, double t_end, int n);
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Operator> states;
    std::map<std::string, std::vector<double>> observables;

    const Operator& final_state() const { return states.back(); }
    void append(const Trajectory& other, bool skip_first = true);
    /// Max over samples of |Tr rho - 1| and of max|rho - rho^dag|.
    double trace_drift() const;
    double hermiticity_drift() const;
};

/// Content-keyed cache of exp(L t). Safe to share between threads.
class PropagatorCache {
public:
    std::shared_ptr<const Matrix> get(const SuperOperator& l, double t);
    size_t size() const;
    size_t hits() const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, std::shared_ptr<const Matrix>> store_;
    size_t hits_ = 0;
};

std::uint64_t content_hash(const Matrix& m, double t);

/// samples = number of equal intervals over [0, duration]; the trajectory
/// holds samples + 1 states starting with rho0.
Trajectory propagate_const(const Operator& rho0, const Operator& h, const std::vector<JumpChannel>& channels,
                           double duration, int samples = 1, PropagatorCache* cache = nullptr);

struct RkOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    int samples = 1;
    double max_step = 0.0;             // 0: unlimited
    double initial_step = 0.0;         // 0: automatic
    std::vector<double> breakpoints;   // times the integrator must land on
    std::size_t max_steps = 20000000;
};

struct RkStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

using HamiltonianFn = std::function<Operator(double)>;

/// Dormand-Prince 5(4) on d rho / dt = -i[H(t), rho] + sum_k r_k D[c_k] rho.
Trajectory propagate_timedep(const Operator& rho0, const HamiltonianFn& h_of_t,
                             const std::vector<JumpChannel>& channels, double duration,
                             const RkOptions& opts = {}, RkStats* stats = nullptr);

/// H(t) = h0 + s(t) W + conj(s(t)) W^dag, the form taken by a weak drive
/// with a complex envelope. Uses sparse products.
struct Drive {
    Operator h0;
    Operator raising;
    std::function<cplx(double)> envelope;
};

Trajectory propagate_drive(const Operator& rho0, const Drive& drive, const std::vector<JumpChannel>& channels,
                           double duration, const RkOptions& opts = {}, RkStats* stats = nullptr);

double observe(const Operator& rho, const Vector& psi);
double observe(const Operator& rho, const Operator& projector);
double purity(const Operator& rho);

/// Fill traj.observables[name] with populations of psi.
void record_population(Trajectory& traj, const std::string& name, const Vector& psi);
void record_purity(Trajectory& traj, const std::string& name = "purity");

}  // namespace flsim
