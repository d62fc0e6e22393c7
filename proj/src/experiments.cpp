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

#include "flsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace flsim {

namespace {

using json = nlohmann::json;

constexpr double kMhz = kTwoPi * 1e6;

double to_mhz(double w) { return w / kMhz; }
double to_us(double t) { return t * 1e6; }

// Runs f(0..n-1) on up to `threads` workers. Each index writes its own
// slot, so results do not depend on the schedule.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& f) {
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        for (size_t k = next++; k < n; k = next++) {
            try {
                f(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int m = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int i = 1; i < m; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string pulse_name(PulseKind k) { return k == PulseKind::Rectangular ? "rect" : "gauss"; }

PulseKind pulse_from_string(const std::string& s) {
    if (s == "rect" || s == "RP") return PulseKind::Rectangular;
    if (s == "gauss" || s == "GP") return PulseKind::Gaussian;
    throw ConfigError("unknown pulse '" + s + "' (expected rect or gauss)");
}

ProtocolLabel protocol_from_string(const std::string& s) {
    if (s == "I" || s == "conversion-I") return ProtocolLabel::ConversionI;
    if (s == "II" || s == "conversion-II") return ProtocolLabel::ConversionII;
    throw ConfigError("unknown protocol '" + s + "' (expected I or II)");
}

std::string protocol_short(ProtocolLabel l) { return l == ProtocolLabel::ConversionI ? "I" : "II"; }
double protocol_id(ProtocolLabel l) { return l == ProtocolLabel::ConversionI ? 1.0 : 2.0; }
double pulse_id(PulseKind k) { return k == PulseKind::Rectangular ? 0.0 : 1.0; }

// ---------------------------------------------------------------- config

double get_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
    return x;
}

double get_positive(const json& v, const std::string& key) {
    const double x = get_number(v, key);
    if (!(x > 0.0)) throw ConfigError("'" + key + "' must be positive");
    return x;
}

double get_nonnegative(const json& v, const std::string& key) {
    const double x = get_number(v, key);
    if (x < 0.0) throw ConfigError("'" + key + "' must be non-negative");
    return x;
}

int get_int(const json& v, const std::string& key, int lo) {
    if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > 1000000) throw ConfigError("'" + key + "' out of range");
    return static_cast<int>(x);
}

bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError("'" + key + "' must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(get_number(v, key));
        return out;
    }
    if (!v.is_array() || v.empty()) throw ConfigError("'" + key + "' must be a non-empty array of numbers");
    for (const auto& x : v) out.push_back(get_number(x, key));
    return out;
}

std::vector<std::string> get_strings(const json& v, const std::string& key) {
    std::vector<std::string> out;
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
        return out;
    }
    if (!v.is_array() || v.empty()) throw ConfigError("'" + key + "' must be a non-empty array of strings");
    for (const auto& x : v) out.push_back(get_string(x, key));
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"experiment", [](ExperimentConfig& c, const json& v) { c.experiment = get_string(v, "experiment"); }},
        {"omega1", [](ExperimentConfig& c, const json& v) { c.laser.omega1 = mhz(get_positive(v, "omega1")); }},
        {"omega2", [](ExperimentConfig& c, const json& v) { c.laser.omega2 = mhz(get_positive(v, "omega2")); }},
        {"delta", [](ExperimentConfig& c, const json& v) { c.laser.delta = mhz(get_positive(v, "delta")); }},
        {"urr", [](ExperimentConfig& c, const json& v) { c.vdw.urr = mhz(get_positive(v, "urr")); }},
        {"r0", [](ExperimentConfig& c, const json& v) { c.vdw.r0 = get_positive(v, "r0"); }},
        {"gamma1", [](ExperimentConfig& c, const json& v) { c.decay.gamma1 = mhz(get_positive(v, "gamma1")); }},
        {"gamma2", [](ExperimentConfig& c, const json& v) { c.decay.gamma2 = mhz(get_positive(v, "gamma2")); }},
        {"gamma3", [](ExperimentConfig& c, const json& v) { c.decay.gamma3 = mhz(get_positive(v, "gamma3")); }},
        {"omega_d1", [](ExperimentConfig& c, const json& v) { c.decay.omega_d1 = mhz(get_positive(v, "omega_d1")); }},
        {"omega_d2", [](ExperimentConfig& c, const json& v) { c.decay.omega_d2 = mhz(get_positive(v, "omega_d2")); }},
        {"omega_d3", [](ExperimentConfig& c, const json& v) { c.decay.omega_d3 = mhz(get_positive(v, "omega_d3")); }},
        {"gamma_r", [](ExperimentConfig& c, const json& v) { c.decay.gamma_r = mhz(get_nonnegative(v, "gamma_r")); }},
        {"tau1_factor", [](ExperimentConfig& c, const json& v) { c.model.tau1_factor = get_positive(v, "tau1_factor"); }},
        {"tau2_factor", [](ExperimentConfig& c, const json& v) { c.model.tau2_factor = get_positive(v, "tau2_factor"); }},
        {"natural_decay", [](ExperimentConfig& c, const json& v) { c.model.natural_decay = get_bool(v, "natural_decay"); }},
        {"natural_branching_0",
         [](ExperimentConfig& c, const json& v) {
             const double b = get_nonnegative(v, "natural_branching_0");
             if (b > 1.0) throw ConfigError("'natural_branching_0' must lie in [0, 1]");
             c.model.natural_branching.branching = {{kG0, b}, {kG1, 1.0 - b}};
         }},
        {"full_hamiltonian",
         [](ExperimentConfig& c, const json& v) { c.model.full_hamiltonian = get_bool(v, "full_hamiltonian"); }},
        {"pulse", [](ExperimentConfig& c, const json& v) { c.pulses = {pulse_from_string(get_string(v, "pulse"))}; }},
        {"pulses",
         [](ExperimentConfig& c, const json& v) {
             c.pulses.clear();
             for (const auto& s : get_strings(v, "pulses")) c.pulses.push_back(pulse_from_string(s));
         }},
        {"omega0", [](ExperimentConfig& c, const json& v) { c.model.omega0 = mhz(get_positive(v, "omega0")); }},
        {"protocols",
         [](ExperimentConfig& c, const json& v) {
             c.protocols.clear();
             for (const auto& s : get_strings(v, "protocols")) c.protocols.push_back(protocol_from_string(s));
         }},
        {"initial_state", [](ExperimentConfig& c, const json& v) { c.initial_state = get_string(v, "initial_state"); }},
        {"n_cycles", [](ExperimentConfig& c, const json& v) { c.n_cycles = get_int(v, "n_cycles", 1); }},
        {"samples_per_step",
         [](ExperimentConfig& c, const json& v) { c.samples_per_step = get_int(v, "samples_per_step", 1); }},
        {"seed",
         [](ExperimentConfig& c, const json& v) {
             if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                 throw ConfigError("'seed' must be a non-negative integer");
             }
             c.seed = v.get<std::uint64_t>();
         }},
        {"n_seeds", [](ExperimentConfig& c, const json& v) { c.n_seeds = get_int(v, "n_seeds", 1); }},
        {"threads", [](ExperimentConfig& c, const json& v) { c.threads = get_int(v, "threads", 1); }},
        {"rel_tol", [](ExperimentConfig& c, const json& v) { c.rk.rel_tol = get_positive(v, "rel_tol"); }},
        {"abs_tol", [](ExperimentConfig& c, const json& v) { c.rk.abs_tol = get_positive(v, "abs_tol"); }},
        {"h0",
         [](ExperimentConfig& c, const json& v) {
             c.h0_values = get_numbers(v, "h0");
             for (double h : c.h0_values) {
                 if (h < 0.0) throw ConfigError("'h0' must be non-negative");
             }
         }},
        {"f_max", [](ExperimentConfig& c, const json& v) { c.f_max = 1e6 * get_positive(v, "f_max"); }},
        {"n_components", [](ExperimentConfig& c, const json& v) { c.n_components = get_int(v, "n_components", 1); }},
        {"noise_mode",
         [](ExperimentConfig& c, const json& v) {
             const std::string s = get_string(v, "noise_mode");
             if (s == "per-step") {
                 c.noise_mode = NoiseMode::PerStep;
             } else if (s == "continuous") {
                 c.noise_mode = NoiseMode::Continuous;
             } else {
                 throw ConfigError("'noise_mode' must be per-step or continuous");
             }
         }},
        {"rabi_seeds", [](ExperimentConfig& c, const json& v) { c.rabi_seeds = get_int(v, "rabi_seeds", 1); }},
        {"rabi_periods", [](ExperimentConfig& c, const json& v) { c.rabi_periods = get_positive(v, "rabi_periods"); }},
        {"delta_r", [](ExperimentConfig& c, const json& v) { c.imperfection.delta_r = get_number(v, "delta_r"); }},
        {"delta_t_fraction",
         [](ExperimentConfig& c, const json& v) {
             c.imperfection.delta_t_fraction = get_number(v, "delta_t_fraction");
         }},
        {"delta_freq",
         [](ExperimentConfig& c, const json& v) { c.imperfection.delta_freq = mhz(get_number(v, "delta_freq")); }},
        {"exact_distance",
         [](ExperimentConfig& c, const json& v) { c.imperfection.exact_distance = get_bool(v, "exact_distance"); }},
        {"ratios", [](ExperimentConfig& c, const json& v) { c.ratios = get_numbers(v, "ratios"); }},
        {"delta_r_grid", [](ExperimentConfig& c, const json& v) { c.delta_r_grid = get_numbers(v, "delta_r_grid"); }},
        {"delta_t_grid", [](ExperimentConfig& c, const json& v) { c.delta_t_grid = get_numbers(v, "delta_t_grid"); }},
        {"detunings",
         [](ExperimentConfig& c, const json& v) {
             c.detunings = get_numbers(v, "detunings");
             for (double& d : c.detunings) d = mhz(d);
         }},
        {"max_cycles", [](ExperimentConfig& c, const json& v) { c.max_cycles = get_int(v, "max_cycles", 1); }},
        {"frame",
         [](ExperimentConfig& c, const json& v) {
             const std::string s = get_string(v, "frame");
             if (s == "static") {
                 c.frame = Frame::Static;
             } else if (s == "interaction") {
                 c.frame = Frame::Interaction;
             } else {
                 throw ConfigError("'frame' must be static or interaction");
             }
         }},
        {"retain_stark", [](ExperimentConfig& c, const json& v) { c.retain_stark = get_bool(v, "retain_stark"); }},
        {"omega1_over_omega2",
         [](ExperimentConfig& c, const json& v) {
             c.validate_omega1_over_omega2 = get_positive(v, "omega1_over_omega2");
         }},
        {"delta_over_omega1",
         [](ExperimentConfig& c, const json& v) {
             c.validate_delta_over_omega1 = get_positive(v, "delta_over_omega1");
         }},
        {"validate_samples",
         [](ExperimentConfig& c, const json& v) { c.validate_samples = get_int(v, "validate_samples", 1); }},
        {"decay_window", [](ExperimentConfig& c, const json& v) { c.decay_window = get_positive(v, "decay_window"); }},
        {"decay_samples", [](ExperimentConfig& c, const json& v) { c.decay_samples = get_int(v, "decay_samples", 1); }},
        {"output_path", [](ExperimentConfig& c, const json& v) { c.output_path = get_string(v, "output_path"); }},
    };
    return table;
}

Operator initial_density(const ExperimentConfig& c, ProtocolLabel l) {
    if (c.initial_state.empty()) return projector(source_state(l));
    if (c.initial_state == "imperfect") {
        return 7.0 / 8.0 * projector(named_state("W0")) + 1.0 / 8.0 * projector(named_state("000"));
    }
    return projector(named_state(c.initial_state));
}

void validate_config(ExperimentConfig& c) {
    try {
        if (!c.laser.validate()) {
            throw ConfigError("omega2 / omega1 exceeds the effective-operator range (0.025)");
        }
        c.decay.validate();
        c.imperfection.validate();
        if (c.vdw.r0 > 0.0 && std::abs(c.imperfection.delta_r) * 1e-3 >= c.vdw.r0) {
            throw ConfigError("|delta_r| must be smaller than r0");
        }
        if (!c.initial_state.empty() && c.initial_state != "imperfect") named_state(c.initial_state);
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    for (double r : c.ratios) {
        if (!(r > 0.0) || r > 0.1) throw ConfigError("'ratios' must lie in (0, 0.1]");
    }
    for (double t : c.delta_t_grid) {
        if (std::abs(t) > 0.5) throw ConfigError("'delta_t_grid' entries must satisfy |dt| <= 0.5");
    }
    for (double r : c.delta_r_grid) {
        if (std::abs(r) * 1e-3 >= c.vdw.r0) throw ConfigError("'delta_r_grid' entries must be smaller than r0");
    }
    if (c.max_cycles < c.n_cycles && c.experiment == "detuning-sweep") {
        throw ConfigError("'max_cycles' must be at least 'n_cycles'");
    }
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------- runners

Protocol build_protocol(const ExperimentConfig& c, ProtocolLabel l, PulseKind pulse, bool full = false) {
    ModelOptions m = c.model;
    m.pulse = pulse;
    m.vdw = c.vdw;
    m.full_hamiltonian = full || c.model.full_hamiltonian;
    Protocol p = make_conversion(l, c.laser, c.decay, m);
    p.noise_mode = c.noise_mode;
    return p;
}

RunOptions run_options(const ExperimentConfig& c, int samples, PropagatorCache* cache) {
    RunOptions o;
    o.samples_per_step = samples;
    o.cache = cache;
    o.rk = c.rk;
    return o;
}

std::vector<PulseKind> pulses_or(const ExperimentConfig& c, std::vector<PulseKind> fallback) {
    return c.pulses.empty() ? fallback : c.pulses;
}

PhaseNoiseSpec noise_spec(const ExperimentConfig& c, double h0, std::uint64_t seed) {
    PhaseNoiseSpec s;
    s.h0 = h0;
    s.f_max = c.f_max;
    s.n_components = c.n_components;
    s.seed = seed;
    return s;
}

void add_drift_scalars(ExperimentOutput& out, const Trajectory& traj) {
    out.scalars.emplace_back("trace_drift", traj.trace_drift());
    out.scalars.emplace_back("hermiticity_drift", traj.hermiticity_drift());
}

ExperimentOutput run_convert(const ExperimentConfig& c, ProtocolLabel l) {
    const PulseKind pulse = pulses_or(c, {PulseKind::Rectangular}).front();
    Protocol proto = build_protocol(c, l, pulse);
    if (!c.imperfection.is_zero()) proto = apply_imperfections(proto, c.imperfection);

    PropagatorCache cache;
    Trajectory traj = run_cycles(initial_density(c, l), proto, c.n_cycles, run_options(c, c.samples_per_step, &cache));

    const Vector ghz = named_state("GHZ-");
    const Vector w0 = named_state("W0");
    ExperimentOutput out;
    ResultTable t;
    t.name = l == ProtocolLabel::ConversionI ? "convert-ghz-to-w" : "convert-w-to-ghz";
    t.columns = {"time_us", "P_GHZ-", "P_W0", "purity"};
    t.units = {"us", "1", "1", "1"};
    for (size_t k = 0; k < traj.states.size(); ++k) {
        const Operator& rho = traj.states[k];
        t.add({to_us(traj.times[k]), observe(rho, ghz), observe(rho, w0), purity(rho)});
    }

    ResultTable cyc;
    cyc.name = t.name + "_cycles";
    cyc.columns = {"cycle", "time_us", "P_target", "purity"};
    cyc.units = {"1", "us", "1", "1"};
    const Vector target = target_state(l);
    const auto ends = cycle_end_states(traj, proto, c.samples_per_step);
    for (size_t k = 0; k < ends.size(); ++k) {
        cyc.add({static_cast<double>(k + 1), to_us((k + 1) * proto.period()), observe(ends[k], target),
                 purity(ends[k])});
    }

    out.scalars.emplace_back("final_population", observe(traj.final_state(), target));
    out.scalars.emplace_back("final_purity", purity(traj.final_state()));
    out.scalars.emplace_back("period_us", to_us(proto.period()));
    out.scalars.emplace_back("total_time_us", to_us(traj.times.back()));
    add_drift_scalars(out, traj);
    out.notes.emplace_back("protocol", to_string(l));
    out.notes.emplace_back("pulse", pulse_name(pulse));
    out.tables.push_back(std::move(t));
    out.tables.push_back(std::move(cyc));
    return out;
}

ExperimentOutput run_spectrum(const ExperimentConfig& c) {
    struct Job {
        ProtocolLabel label;
        double ratio;
        bool full;
    };
    std::vector<Job> jobs;
    for (auto l : c.protocols) {
        jobs.push_back({l, c.laser.omega2 / c.laser.omega1, false});
        for (double r : c.ratios) jobs.push_back({l, r, true});
    }
    struct Res {
        SpectrumResult spec;
        LogResult log;
    };
    std::vector<Res> res(jobs.size());
    PropagatorCache cache;
    parallel_for(jobs.size(), c.threads, [&](size_t k) {
        ExperimentConfig cc = c;
        cc.laser.omega2 = jobs[k].ratio * c.laser.omega1;
        const Protocol proto = build_protocol(cc, jobs[k].label, PulseKind::Rectangular, jobs[k].full);
        const EffectiveGenerator g = effective_liouvillian_checked(proto, &cache);
        res[k].log = g.log;
        res[k].spec = floquet_steady_state(g.propagator, proto.period(), target_state(jobs[k].label));
    });

    ExperimentOutput out;
    ResultTable sum;
    sum.name = "liouvillian-spectrum";
    sum.columns = {"protocol", "ratio", "full_model", "target_population", "purity", "spectral_gap",
                   "zero_modes", "min_eigenvalue", "log_round_trip"};
    sum.units = {"1", "1", "1", "1", "1", "2pi MHz", "1", "1", "1"};
    ResultTable ev;
    ev.name = "liouvillian-spectrum_eigenvalues";
    ev.columns = {"protocol", "ratio", "full_model", "index", "re", "im", "modulus"};
    ev.units = {"1", "1", "1", "1", "2pi MHz", "2pi MHz", "2pi MHz"};
    for (size_t k = 0; k < jobs.size(); ++k) {
        const SpectrumResult& s = res[k].spec;
        const double pid = protocol_id(jobs[k].label);
        const double full = jobs[k].full ? 1.0 : 0.0;
        sum.add({pid, jobs[k].ratio, full, s.target_population, s.purity, to_mhz(s.spectral_gap),
                 static_cast<double>(s.zero_modes), s.min_eigenvalue, res[k].log.round_trip});
        for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
            const cplx l = s.eigenvalues(i);
            ev.add({pid, jobs[k].ratio, full, static_cast<double>(i), to_mhz(l.real()), to_mhz(l.imag()),
                    to_mhz(std::abs(l))});
        }
    }
    out.notes.emplace_back("model", "full_model=0 rows use the effective operators at the configured omega2, "
                                    "full_model=1 rows the static-frame operators");
    out.tables.push_back(std::move(sum));
    out.tables.push_back(std::move(ev));
    return out;
}

Trajectory rabi_run(const Drive& base, const Operator& rho0, double duration, int samples,
                    std::shared_ptr<const NoiseTrace> trace, const RkOptions& rk0) {
    RkOptions rk = rk0;
    rk.samples = samples;
    Drive d = base;
    if (trace) {
        d = apply_phase_noise(base, trace, duration);
        for (size_t i = 1; i + 1 < trace->phi.size(); ++i) {
            const double t = static_cast<double>(i) * trace->dt;
            if (t < duration) rk.breakpoints.push_back(t);
        }
    }
    return propagate_drive(rho0, d, {}, duration, rk);
}

ExperimentOutput run_phase_noise(const ExperimentConfig& c) {
    ExperimentOutput out;

    // Rabi oscillations under the two pump variants.
    struct RabiCase {
        PumpVariant variant;
        std::string from, to;
        double rate;
    };
    const double o2 = c.laser.omega2;
    const std::vector<RabiCase> cases = {{PumpVariant::EP0, "000", "D0", std::sqrt(3.0) * o2},
                                         {PumpVariant::SE0, "110", "11r", o2}};
    const int rabi_samples = 200;
    ResultTable rabi;
    rabi.name = "phase-noise_rabi";
    rabi.columns = {"h0", "variant", "time_us", "P_from_mean", "P_to_mean", "P_from_noiseless"};
    rabi.units = {"Hz^2/Hz", "1", "us", "1", "1", "1"};
    double worst_norm = 0.0;
    for (double h0 : c.h0_values) {
        for (size_t ci = 0; ci < cases.size(); ++ci) {
            const RabiCase& rc = cases[ci];
            LaserParams p = c.laser;
            p.variant = rc.variant;
            const Operator h = build_effective_hamiltonian(p);
            const Operator w = weak_raising_part(p, false);
            Drive base{h - w - dagger(w), w, [](double) { return cplx(1.0, 0.0); }};
            const double duration = c.rabi_periods * kTwoPi / rc.rate;
            const Vector from = named_state(rc.from);
            const Vector to = named_state(rc.to);
            const Operator rho0 = projector(from);

            const Trajectory clean = rabi_run(base, rho0, duration, rabi_samples, nullptr, c.rk);
            std::vector<std::vector<double>> pf(c.rabi_seeds), pt(c.rabi_seeds);
            std::vector<double> norm(c.rabi_seeds);
            parallel_for(c.rabi_seeds, c.threads, [&](size_t s) {
                const auto spec = noise_spec(c, h0, derive_seed(c.seed, 100000 + 1000 * ci + s));
                auto trace = std::make_shared<const NoiseTrace>(phase_noise_trace(spec, duration));
                const Trajectory tr = rabi_run(base, rho0, duration, rabi_samples, trace, c.rk);
                for (const auto& rho : tr.states) {
                    pf[s].push_back(observe(rho, from));
                    pt[s].push_back(observe(rho, to));
                }
                norm[s] = tr.trace_drift();
            });
            for (double n : norm) worst_norm = std::max(worst_norm, n);
            for (size_t i = 0; i < clean.states.size(); ++i) {
                double mf = 0.0, mt = 0.0;
                for (int s = 0; s < c.rabi_seeds; ++s) {
                    mf += pf[s][i];
                    mt += pt[s][i];
                }
                rabi.add({h0, static_cast<double>(ci), to_us(clean.times[i]), mf / c.rabi_seeds, mt / c.rabi_seeds,
                          observe(clean.states[i], from)});
            }
        }
    }
    out.scalars.emplace_back("rabi_max_trace_drift", worst_norm);

    // Conversions averaged over n_seeds realizations.
    ResultTable conv;
    conv.name = "phase-noise_conversion";
    conv.columns = {"h0", "protocol", "time_us", "P_target_mean"};
    conv.units = {"Hz^2/Hz", "1", "us", "1"};
    ResultTable fin;
    fin.name = "phase-noise_final";
    fin.columns = {"h0", "protocol", "seed_index", "seed", "P_target_final"};
    fin.units = {"Hz^2/Hz", "1", "1", "1", "1"};
    const PulseKind pulse = pulses_or(c, {PulseKind::Rectangular}).front();
    PropagatorCache cache;
    for (double h0 : c.h0_values) {
        for (auto l : c.protocols) {
            const Vector target = target_state(l);
            std::vector<std::vector<double>> pops(c.n_seeds);
            std::vector<double> times;
            std::vector<std::uint64_t> seeds(c.n_seeds);
            parallel_for(c.n_seeds, c.threads, [&](size_t s) {
                Protocol proto = build_protocol(c, l, pulse);
                seeds[s] = derive_seed(c.seed, 1000 * static_cast<std::uint64_t>(protocol_id(l)) + s);
                proto.noise = noise_spec(c, h0, seeds[s]);
                const Trajectory tr = run_cycles(initial_density(c, l), proto, c.n_cycles,
                                                 run_options(c, c.samples_per_step, &cache));
                for (const auto& rho : tr.states) pops[s].push_back(observe(rho, target));
                if (s == 0) times = tr.times;
            });
            double mean = 0.0, sq = 0.0;
            for (int s = 0; s < c.n_seeds; ++s) {
                const double f = pops[s].back();
                fin.add({h0, protocol_id(l), static_cast<double>(s), static_cast<double>(seeds[s]), f});
                mean += f;
                sq += f * f;
            }
            mean /= c.n_seeds;
            const double var = c.n_seeds > 1 ? std::max(0.0, (sq - c.n_seeds * mean * mean) / (c.n_seeds - 1)) : 0.0;
            for (size_t i = 0; i < times.size(); ++i) {
                double m = 0.0;
                for (int s = 0; s < c.n_seeds; ++s) m += pops[s][i];
                conv.add({h0, protocol_id(l), to_us(times[i]), m / c.n_seeds});
            }
            const std::string key = protocol_short(l) + "_h0_" + fmt(h0);
            out.scalars.emplace_back("mean_final_" + key, mean);
            out.scalars.emplace_back("std_final_" + key, std::sqrt(var));
        }
    }
    out.notes.emplace_back("noise_mode", c.noise_mode == NoiseMode::PerStep ? "per-step" : "continuous");
    out.tables.push_back(std::move(rabi));
    out.tables.push_back(std::move(conv));
    out.tables.push_back(std::move(fin));
    return out;
}

ExperimentOutput run_robustness(const ExperimentConfig& c) {
    struct Job {
        ProtocolLabel label;
        PulseKind pulse;
        double dr, dt;
    };
    std::vector<Job> jobs;
    const auto pulses = pulses_or(c, {PulseKind::Rectangular, PulseKind::Gaussian});
    for (auto l : c.protocols) {
        for (auto p : pulses) {
            for (double dr : c.delta_r_grid) {
                for (double dt : c.delta_t_grid) jobs.push_back({l, p, dr, dt});
            }
        }
    }
    std::vector<double> pop(jobs.size());
    PropagatorCache cache;
    parallel_for(jobs.size(), c.threads, [&](size_t k) {
        const Job& j = jobs[k];
        Protocol proto = build_protocol(c, j.label, j.pulse, true);
        ImperfectionSpec spec = c.imperfection;
        spec.delta_r = j.dr;
        spec.delta_t_fraction = j.dt;
        proto = apply_imperfections(proto, spec);
        const Trajectory tr = run_cycles(initial_density(c, j.label), proto, c.n_cycles, run_options(c, 1, &cache));
        pop[k] = observe(tr.final_state(), target_state(j.label));
    });

    ExperimentOutput out;
    ResultTable t;
    t.name = "robustness-sweep";
    t.columns = {"protocol", "pulse", "delta_r_nm", "delta_t_fraction", "population"};
    t.units = {"1", "1", "nm", "1", "1"};
    for (size_t k = 0; k < jobs.size(); ++k) {
        t.add({protocol_id(jobs[k].label), pulse_id(jobs[k].pulse), jobs[k].dr, jobs[k].dt, pop[k]});
    }
    // GP minus RP at matching points.
    for (auto l : c.protocols) {
        double worst = std::numeric_limits<double>::infinity();
        for (size_t a = 0; a < jobs.size(); ++a) {
            if (jobs[a].label != l || jobs[a].pulse != PulseKind::Gaussian) continue;
            for (size_t b = 0; b < jobs.size(); ++b) {
                if (jobs[b].label == l && jobs[b].pulse == PulseKind::Rectangular && jobs[b].dr == jobs[a].dr &&
                    jobs[b].dt == jobs[a].dt) {
                    worst = std::min(worst, pop[a] - pop[b]);
                }
            }
        }
        if (std::isfinite(worst)) out.scalars.emplace_back("min_gp_minus_rp_" + protocol_short(l), worst);
    }
    out.notes.emplace_back("model", "static-frame operators at every grid point");
    out.tables.push_back(std::move(t));
    return out;
}

ExperimentOutput run_pulse_compare(const ExperimentConfig& c) {
    ExperimentOutput out;
    ResultTable cyc;
    cyc.name = "pulse-compare_cycles";
    cyc.columns = {"protocol", "cycle", "time_rp_us", "P_rp", "time_gp_us", "P_gp"};
    cyc.units = {"1", "1", "us", "1", "us", "1"};
    ResultTable tr;
    tr.name = "pulse-compare_trajectory";
    tr.columns = {"protocol", "pulse", "time_us", "P_target"};
    tr.units = {"1", "1", "us", "1"};
    ResultTable sum;
    sum.name = "pulse-compare";
    sum.columns = {"protocol", "period_rp_us", "period_gp_us", "coherent_rp_us", "coherent_gp_us", "saving_us",
                   "P_rp", "P_gp"};
    sum.units = {"1", "us", "us", "us", "us", "us", "1", "1"};

    std::vector<std::pair<ProtocolLabel, PulseKind>> jobs;
    for (auto l : c.protocols) {
        jobs.emplace_back(l, PulseKind::Rectangular);
        jobs.emplace_back(l, PulseKind::Gaussian);
    }
    std::vector<Protocol> protos(jobs.size());
    std::vector<Trajectory> trajs(jobs.size());
    PropagatorCache cache;
    parallel_for(jobs.size(), c.threads, [&](size_t k) {
        protos[k] = build_protocol(c, jobs[k].first, jobs[k].second);
        trajs[k] = run_cycles(initial_density(c, jobs[k].first), protos[k], c.n_cycles,
                              run_options(c, c.samples_per_step, &cache));
    });
    for (size_t k = 0; k < jobs.size(); k += 2) {
        const ProtocolLabel l = jobs[k].first;
        const Vector target = target_state(l);
        const auto rp = cycle_end_states(trajs[k], protos[k], c.samples_per_step);
        const auto gp = cycle_end_states(trajs[k + 1], protos[k + 1], c.samples_per_step);
        for (size_t i = 0; i < rp.size(); ++i) {
            cyc.add({protocol_id(l), static_cast<double>(i + 1), to_us((i + 1) * protos[k].period()),
                     observe(rp[i], target), to_us((i + 1) * protos[k + 1].period()), observe(gp[i], target)});
        }
        for (size_t j = k; j < k + 2; ++j) {
            for (size_t i = 0; i < trajs[j].states.size(); ++i) {
                tr.add({protocol_id(l), pulse_id(jobs[j].second), to_us(trajs[j].times[i]),
                        observe(trajs[j].states[i], target)});
            }
        }
        const double saving = c.n_cycles * (protos[k].coherent_time() - protos[k + 1].coherent_time());
        sum.add({protocol_id(l), to_us(protos[k].period()), to_us(protos[k + 1].period()),
                 to_us(protos[k].coherent_time()), to_us(protos[k + 1].coherent_time()), to_us(saving),
                 observe(trajs[k].final_state(), target), observe(trajs[k + 1].final_state(), target)});
        out.scalars.emplace_back("saving_us_" + protocol_short(l), to_us(saving));
    }
    out.tables.push_back(std::move(sum));
    out.tables.push_back(std::move(cyc));
    out.tables.push_back(std::move(tr));
    return out;
}

ExperimentOutput run_validate_effective(const ExperimentConfig& c) {
    const double o2 = c.laser.omega2;
    LaserParams p = c.laser;
    p.omega1 = c.validate_omega1_over_omega2 * o2;
    p.delta = c.validate_delta_over_omega1 * p.omega1;
    const VdwParams v = VdwParams::from_urr(p.delta, c.vdw.r0);

    const std::vector<std::pair<double, std::string>> mix = {{0.19, "111"}, {0.05, "W0'"}, {0.11, "W0"},
                                                             {0.23, "W0''"}, {0.15, "000"}, {0.27, "011"}};
    Operator rho0 = Operator::Zero(kDim, kDim);
    for (const auto& [w, s] : mix) rho0 += w * projector(named_state(s));

    const double duration = kTwoPi / o2;
    const int n = c.validate_samples;
    std::vector<PumpVariant> variants = {PumpVariant::EP0, PumpVariant::SE0};
    std::vector<Trajectory> full(variants.size()), eff(variants.size());
    parallel_for(2 * variants.size(), c.threads, [&](size_t k) {
        LaserParams q = p;
        q.variant = variants[k / 2];
        if (k % 2 == 1) {
            eff[k / 2] = propagate_const(rho0, build_effective_hamiltonian(q), {}, duration, n);
            return;
        }
        if (c.frame == Frame::Static && !c.retain_stark) {
            full[k / 2] = propagate_const(rho0, build_full_hamiltonian(q, v, Frame::Static, 0.0), {}, duration, n);
            return;
        }
        RkOptions rk = c.rk;
        rk.samples = n;
        rk.max_step = kTwoPi / q.delta / 8.0;
        const Frame frame = c.frame;
        const bool stark = c.retain_stark;
        full[k / 2] = propagate_timedep(
            rho0, [q, v, frame, stark](double t) { return build_full_hamiltonian(q, v, frame, t, stark); }, {},
            duration, rk);
    });

    ExperimentOutput out;
    ResultTable t;
    t.name = "validate-effective";
    t.columns = {"variant", "omega2_t"};
    t.units = {"1", "rad"};
    for (const auto& m : mix) {
        t.columns.push_back("P_" + m.second + "_full");
        t.columns.push_back("P_" + m.second + "_eff");
        t.units.push_back("1");
        t.units.push_back("1");
    }
    for (size_t vi = 0; vi < variants.size(); ++vi) {
        double worst = 0.0;
        for (int i = 0; i <= n; ++i) {
            std::vector<double> row = {static_cast<double>(vi), o2 * eff[vi].times[i]};
            for (const auto& m : mix) {
                const Vector psi = named_state(m.second);
                const double a = observe(full[vi].states[i], psi);
                const double b = observe(eff[vi].states[i], psi);
                worst = std::max(worst, std::abs(a - b));
                row.push_back(a);
                row.push_back(b);
            }
            t.add(std::move(row));
        }
        out.scalars.emplace_back("max_abs_diff_" + to_string(variants[vi]), worst);
    }
    out.notes.emplace_back("frame", c.frame == Frame::Static ? "static" : "interaction");
    out.notes.emplace_back("variants", "0 = EP0, 1 = SE0");
    out.tables.push_back(std::move(t));
    return out;
}

ExperimentOutput run_validate_decay(const ExperimentConfig& c) {
    const DecayParams& d = c.decay;
    ExperimentOutput out;

    auto propagate_model = [&](const SingleAtomModel& m, double window) {
        const int n = static_cast<int>(m.levels.size());
        Operator rho0 = Operator::Zero(n, n);
        const int r = m.index("r");
        rho0(r, r) = 1.0;
        return propagate_const(rho0, m.hamiltonian, m.channels, window, c.decay_samples);
    };

    {
        const double window = c.decay_window / d.Gamma1();
        const SingleAtomModel fm = full_cd_model(d), em = effective_cd_model(d);
        const Trajectory ft = propagate_model(fm, window), et = propagate_model(em, window);
        ResultTable t;
        t.name = "validate-decay_cd";
        t.columns = {"time_us", "pop_full", "pop_effective", "pop_analytic"};
        t.units = {"us", "1", "1", "1"};
        double dev = 0.0, dev_an = 0.0;
        const int f0 = fm.index("0"), e0 = em.index("0");
        for (size_t i = 0; i < ft.times.size(); ++i) {
            const double a = ft.states[i](f0, f0).real();
            const double b = et.states[i](e0, e0).real();
            const double an = cd_ground_population(d.Gamma1(), ft.times[i]);
            dev = std::max(dev, std::abs(a - b));
            dev_an = std::max(dev_an, std::abs(b - an));
            t.add({to_us(ft.times[i]), a, b, an});
        }
        out.scalars.emplace_back("cd_max_full_minus_effective", dev);
        out.scalars.emplace_back("cd_max_effective_minus_analytic", dev_an);
        out.scalars.emplace_back("cd_duration_0.99_times_Gamma1", decay_duration(0.99, ChannelKind::CD, d) * d.Gamma1());
        out.tables.push_back(std::move(t));
    }
    {
        const double window = c.decay_window / d.Gamma2();
        const SingleAtomModel fm = full_ucd_model(d), em = effective_ucd_model(d);
        const Trajectory ft = propagate_model(fm, window), et = propagate_model(em, window);
        ResultTable t;
        t.name = "validate-decay_ucd";
        t.columns = {"time_us", "pop_full", "pop_effective", "pop_analytic", "rho00_full", "rho11_full"};
        t.units = {"us", "1", "1", "1", "1", "1"};
        double dev = 0.0, dev_an = 0.0;
        const int f0 = fm.index("0"), f1 = fm.index("1"), e0 = em.index("0"), e1 = em.index("1");
        for (size_t i = 0; i < ft.times.size(); ++i) {
            const double p0 = ft.states[i](f0, f0).real(), p1 = ft.states[i](f1, f1).real();
            const double b = et.states[i](e0, e0).real() + et.states[i](e1, e1).real();
            const double an = ucd_ground_population(d.Gamma2(), d.Gamma3(), ft.times[i]);
            dev = std::max(dev, std::abs(p0 + p1 - b));
            dev_an = std::max(dev_an, std::abs(b - an));
            t.add({to_us(ft.times[i]), p0 + p1, b, an, p0, p1});
        }
        out.scalars.emplace_back("ucd_max_full_minus_effective", dev);
        out.scalars.emplace_back("ucd_max_effective_minus_analytic", dev_an);
        out.scalars.emplace_back("ucd_duration_0.99_times_Gamma2",
                                 decay_duration(0.99, ChannelKind::UCD, d) * d.Gamma2());
        out.tables.push_back(std::move(t));
    }
    return out;
}

ExperimentOutput run_detuning(const ExperimentConfig& c) {
    struct Job {
        ProtocolLabel label;
        PulseKind pulse;
        double detuning;
    };
    std::vector<Job> jobs;
    for (auto l : c.protocols) {
        for (auto p : pulses_or(c, {PulseKind::Rectangular, PulseKind::Gaussian})) {
            for (double d : c.detunings) jobs.push_back({l, p, d});
        }
    }
    std::vector<std::vector<double>> pops(jobs.size());
    PropagatorCache cache;
    parallel_for(jobs.size(), c.threads, [&](size_t k) {
        Protocol proto = build_protocol(c, jobs[k].label, jobs[k].pulse);
        ImperfectionSpec spec = c.imperfection;
        spec.delta_freq = jobs[k].detuning;
        proto = apply_imperfections(proto, spec);
        const Trajectory tr =
            run_cycles(initial_density(c, jobs[k].label), proto, c.max_cycles, run_options(c, 1, &cache));
        const Vector target = target_state(jobs[k].label);
        for (const auto& rho : cycle_end_states(tr, proto, 1)) pops[k].push_back(observe(rho, target));
    });

    ExperimentOutput out;
    ResultTable t;
    t.name = "detuning-sweep";
    t.columns = {"protocol", "pulse", "detuning_khz", "cycle", "population"};
    t.units = {"1", "1", "2pi kHz", "1", "1"};
    ResultTable s;
    s.name = "detuning-sweep_summary";
    s.columns = {"protocol", "pulse", "detuning_khz", "population_at_n_cycles", "first_cycle_ge_0.99"};
    s.units = {"1", "1", "2pi kHz", "1", "1"};
    for (size_t k = 0; k < jobs.size(); ++k) {
        const double dk = std::round(jobs[k].detuning / khz(1.0) * 1e9) / 1e9;
        int first = -1;
        for (size_t i = 0; i < pops[k].size(); ++i) {
            t.add({protocol_id(jobs[k].label), pulse_id(jobs[k].pulse), dk, static_cast<double>(i + 1), pops[k][i]});
            if (first < 0 && pops[k][i] >= 0.99) first = static_cast<int>(i + 1);
        }
        s.add({protocol_id(jobs[k].label), pulse_id(jobs[k].pulse), dk, pops[k][c.n_cycles - 1],
               static_cast<double>(first)});
    }
    out.tables.push_back(std::move(s));
    out.tables.push_back(std::move(t));
    return out;
}

ExperimentOutput run_table1(const ExperimentConfig& c) {
    const ProtocolLabel l = ProtocolLabel::ConversionII;
    const Vector target = target_state(l);
    const Operator ideal = projector(source_state(l));
    const Operator imperfect =
        7.0 / 8.0 * projector(named_state("W0")) + 1.0 / 8.0 * projector(named_state("000"));
    const auto pulses = pulses_or(c, {PulseKind::Rectangular, PulseKind::Gaussian});
    // Columns: ideal, imperfect initial state, U_rr + 10 %, U_rr - 10 %.
    std::vector<double> values(pulses.size() * 4);
    PropagatorCache cache;
    parallel_for(values.size(), c.threads, [&](size_t k) {
        const PulseKind pulse = pulses[k / 4];
        const int col = static_cast<int>(k % 4);
        ExperimentConfig cc = c;
        bool full = false;
        if (col >= 2) {
            cc.vdw = VdwParams::from_urr(c.vdw.urr * (col == 2 ? 1.1 : 0.9), c.vdw.r0);
            full = true;
        }
        const Protocol proto = build_protocol(cc, l, pulse, full);
        const Trajectory tr = run_cycles(col == 1 ? imperfect : ideal, proto, c.n_cycles, run_options(c, 1, &cache));
        values[k] = 100.0 * observe(tr.final_state(), target);
    });
    ExperimentOutput out;
    ResultTable t;
    t.name = "table1";
    t.columns = {"pulse", "ideal_pct", "imperfect_initial_pct", "urr_plus10_pct", "urr_minus10_pct"};
    t.units = {"1", "%", "%", "%", "%"};
    for (size_t i = 0; i < pulses.size(); ++i) {
        t.add({pulse_id(pulses[i]), values[4 * i], values[4 * i + 1], values[4 * i + 2], values[4 * i + 3]});
    }
    out.notes.emplace_back("protocol", to_string(l));
    out.notes.emplace_back("pulse", "0 = rectangular, 1 = Gaussian");
    out.tables.push_back(std::move(t));
    return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "convert-ghz-to-w", "convert-w-to-ghz", "liouvillian-spectrum", "phase-noise", "robustness-sweep",
        "pulse-compare",    "validate-effective", "validate-decay",     "detuning-sweep", "table1"};
    return names;
}

ExperimentConfig load_config(const std::string& experiment, const std::string& json_text,
                             const CliOverrides& overrides) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end()) {
        throw ConfigError("unknown experiment '" + experiment + "'");
    }
    ExperimentConfig c;
    c.experiment = experiment;
    json doc = json::object();
    bool blank = std::all_of(json_text.begin(), json_text.end(), [](unsigned char ch) { return std::isspace(ch); });
    if (!blank) {
        try {
            doc = json::parse(json_text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("malformed JSON: ") + e.what());
        }
    }
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    const auto& table = setters();
    for (const auto& [key, value] : doc.items()) {
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
        try {
            it->second(c, value);
        } catch (const json::exception& e) {
            throw ConfigError("'" + key + "': " + e.what());
        }
    }
    if (c.experiment != experiment) {
        throw ConfigError("config names experiment '" + c.experiment + "' but '" + experiment + "' was requested");
    }
    c.vdw = VdwParams::from_urr(c.vdw.urr, c.vdw.r0);
    c.model.vdw = c.vdw;

    if (overrides.seed) c.seed = *overrides.seed;
    if (overrides.threads) {
        if (*overrides.threads < 1) throw ConfigError("threads must be at least 1");
        c.threads = *overrides.threads;
    }
    if (overrides.full_hamiltonian) c.model.full_hamiltonian = true;
    if (overrides.pulse) c.pulses = {*overrides.pulse};
    if (overrides.out_dir) c.output_path = *overrides.out_dir;
    validate_config(c);
    return c;
}

std::string canonical_config(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["omega1"] = to_mhz(c.laser.omega1);
    j["omega2"] = to_mhz(c.laser.omega2);
    j["delta"] = to_mhz(c.laser.delta);
    j["urr"] = to_mhz(c.vdw.urr);
    j["r0"] = c.vdw.r0;
    j["gamma1"] = to_mhz(c.decay.gamma1);
    j["gamma2"] = to_mhz(c.decay.gamma2);
    j["gamma3"] = to_mhz(c.decay.gamma3);
    j["omega_d1"] = to_mhz(c.decay.omega_d1);
    j["omega_d2"] = to_mhz(c.decay.omega_d2);
    j["omega_d3"] = to_mhz(c.decay.omega_d3);
    j["gamma_r"] = to_mhz(c.decay.gamma_r);
    j["tau1_factor"] = c.model.tau1_factor;
    j["tau2_factor"] = c.model.tau2_factor;
    j["natural_decay"] = c.model.natural_decay;
    j["natural_branching_0"] = c.model.natural_branching.resolved_branching().at(kG0);
    j["full_hamiltonian"] = c.model.full_hamiltonian;
    if (!c.pulses.empty()) {
        json pulses = json::array();
        for (auto p : c.pulses) pulses.push_back(pulse_name(p));
        j["pulses"] = pulses;
    }
    j["omega0"] = to_mhz(c.model.omega0);
    json protos = json::array();
    for (auto l : c.protocols) protos.push_back(protocol_short(l));
    j["protocols"] = protos;
    j["initial_state"] = c.initial_state;
    j["n_cycles"] = c.n_cycles;
    j["samples_per_step"] = c.samples_per_step;
    j["seed"] = c.seed;
    j["n_seeds"] = c.n_seeds;
    j["rel_tol"] = c.rk.rel_tol;
    j["abs_tol"] = c.rk.abs_tol;
    j["h0"] = c.h0_values;
    j["f_max"] = c.f_max * 1e-6;
    j["n_components"] = c.n_components;
    j["noise_mode"] = c.noise_mode == NoiseMode::PerStep ? "per-step" : "continuous";
    j["rabi_seeds"] = c.rabi_seeds;
    j["rabi_periods"] = c.rabi_periods;
    j["delta_r"] = c.imperfection.delta_r;
    j["delta_t_fraction"] = c.imperfection.delta_t_fraction;
    j["delta_freq"] = to_mhz(c.imperfection.delta_freq);
    j["exact_distance"] = c.imperfection.exact_distance;
    j["ratios"] = c.ratios;
    j["delta_r_grid"] = c.delta_r_grid;
    j["delta_t_grid"] = c.delta_t_grid;
    std::vector<double> det;
    for (double d : c.detunings) det.push_back(to_mhz(d));
    j["detunings"] = det;
    j["max_cycles"] = c.max_cycles;
    j["frame"] = c.frame == Frame::Static ? "static" : "interaction";
    j["retain_stark"] = c.retain_stark;
    j["omega1_over_omega2"] = c.validate_omega1_over_omega2;
    j["delta_over_omega1"] = c.validate_delta_over_omega1;
    j["validate_samples"] = c.validate_samples;
    j["decay_window"] = c.decay_window;
    j["decay_samples"] = c.decay_samples;
    return j.dump();
}

void ResultTable::add(std::vector<double> row) {
    if (row.size() != columns.size()) {
        throw DimensionMismatch("table '" + name + "': row has " + std::to_string(row.size()) + " values, expected " +
                                std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

ExperimentOutput run_experiment(const ExperimentConfig& c) {
    const std::string& e = c.experiment;
    if (e == "convert-ghz-to-w") return run_convert(c, ProtocolLabel::ConversionI);
    if (e == "convert-w-to-ghz") return run_convert(c, ProtocolLabel::ConversionII);
    if (e == "liouvillian-spectrum") return run_spectrum(c);
    if (e == "phase-noise") return run_phase_noise(c);
    if (e == "robustness-sweep") return run_robustness(c);
    if (e == "pulse-compare") return run_pulse_compare(c);
    if (e == "validate-effective") return run_validate_effective(c);
    if (e == "validate-decay") return run_validate_decay(c);
    if (e == "detuning-sweep") return run_detuning(c);
    if (e == "table1") return run_table1(c);
    throw ConfigError("unknown experiment '" + e + "'");
}

std::string to_csv(const ResultTable& t) {
    std::string s;
    auto line = [&s](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ',';
            s += cells[i];
        }
        s += '\n';
    };
    line(t.columns);
    line(t.units);
    for (const auto& row : t.rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double x : row) cells.push_back(fmt(x));
        line(cells);
    }
    return s;
}

void write_outputs(const ExperimentConfig& c, const ExperimentOutput& out, double wall_seconds) {
    namespace fs = std::filesystem;
    const fs::path dir(c.output_path);
    fs::create_directories(dir);
    json meta;
    const std::string canon = canonical_config(c);
    meta["experiment"] = c.experiment;
    meta["version"] = FLSIM_VERSION;
    meta["config"] = json::parse(canon);
    meta["config_hash"] = hex64(fnv1a(canon));
    meta["seed"] = c.seed;
    meta["threads"] = c.threads;
    meta["wall_time_s"] = wall_seconds;
    json tables = json::array();
    for (const auto& t : out.tables) {
        const std::string file = t.name + ".csv";
        std::ofstream f(dir / file, std::ios::binary);
        if (!f) throw NumericalError("cannot write " + (dir / file).string());
        f << to_csv(t);
        tables.push_back({{"name", t.name}, {"file", file}, {"columns", t.columns}, {"units", t.units},
                          {"rows", t.rows.size()}});
    }
    meta["tables"] = tables;
    json scalars = json::object();
    for (const auto& [k, v] : out.scalars) scalars[k] = v;
    meta["scalars"] = scalars;
    json notes = json::object();
    for (const auto& [k, v] : out.notes) notes[k] = v;
    meta["notes"] = notes;
    std::ofstream f(dir / (c.experiment + ".json"), std::ios::binary);
    if (!f) throw NumericalError("cannot write metadata sidecar");
    f << meta.dump(2) << '\n';
}

}  // namespace flsim
