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

#include "flsim/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "flsim/errors.hpp"

namespace flsim {

std::string to_string(ProtocolLabel l) {
    return l == ProtocolLabel::ConversionI ? "conversion-I" : "conversion-II";
}

Operator ProtocolStep::hamiltonian() const {
    if (kind == StepKind::Dissipative) return h_rest;
    Operator h = h_rest + raising + raising.adjoint();
    if (detuning != 0.0) h += detuning * rydberg_number();
    return h;
}

std::vector<JumpChannel> ProtocolStep::all_channels() const {
    std::vector<JumpChannel> out = channels;
    out.insert(out.end(), always_on.begin(), always_on.end());
    return out;
}

double Protocol::period() const {
    double t = 0.0;
    for (const auto& s : steps) t += s.duration;
    return t;
}

double Protocol::coherent_time() const {
    double t = 0.0;
    for (const auto& s : steps) {
        if (s.kind == StepKind::Coherent) t += s.duration;
    }
    return t;
}

namespace {

double pulse_area_factor(PumpVariant v) {
    switch (v) {
        case PumpVariant::EP0:
        case PumpVariant::EP1: return std::sqrt(3.0);
        case PumpVariant::SEplus: return std::sqrt(2.0);
        case PumpVariant::SE0:
        case PumpVariant::SE1: return 1.0;
    }
    return 1.0;
}

std::vector<JumpChannel> natural_channels(const DecayParams& d, const ModelOptions& m) {
    if (!m.natural_decay) return {};
    return effective_channels(m.natural_branching, d);
}

}  // namespace

ProtocolStep make_coherent_step(PumpVariant v, const LaserParams& p, const DecayParams& d, const ModelOptions& m) {
    LaserParams q = p;
    q.variant = v;
    q.validate();
    const double alpha = pulse_area_factor(v);

    ProtocolStep s;
    s.kind = StepKind::Coherent;
    s.label = to_string(v);
    s.variant = v;
    if (m.pulse == PulseKind::Gaussian) {
        s.pulse = PulseShape::gaussian(alpha, m.omega0);
        s.duration = s.pulse.support();
        q.omega2 = m.omega0;
    } else {
        s.pulse = PulseShape::rectangular();
        s.duration = M_PI / (alpha * q.omega2);
    }
    s.raising = weak_raising_part(q, m.full_hamiltonian);
    if (m.full_hamiltonian) {
        s.h_rest = build_full_hamiltonian(q, m.vdw, Frame::Static, 0.0) - s.raising - s.raising.adjoint();
    } else {
        s.h_rest = Operator::Zero(kDim, kDim);
    }
    s.always_on = natural_channels(d, m);
    return s;
}

ProtocolStep make_dissipative_step(ChannelKind k, const DecayParams& d, const ModelOptions& m) {
    if (k == ChannelKind::NaturalRydberg) throw InvalidInput("natural decay is not an engineered step");
    ProtocolStep s;
    s.kind = StepKind::Dissipative;
    s.label = to_string(k);
    s.channel = k;
    s.h_rest = Operator::Zero(kDim, kDim);
    s.raising = Operator::Zero(kDim, kDim);
    s.channels = effective_channels(k, d);
    s.always_on = natural_channels(d, m);
    s.duration = (k == ChannelKind::CD) ? m.tau1_factor / d.Gamma1() : m.tau2_factor / d.Gamma2();
    return s;
}

Protocol make_conversion_I(const LaserParams& p, const DecayParams& d, const ModelOptions& m) {
    Protocol proto;
    proto.label = ProtocolLabel::ConversionI;
    proto.laser = p;
    proto.decay = d;
    proto.model = m;
    proto.steps = {make_coherent_step(PumpVariant::EP1, p, d, m), make_dissipative_step(ChannelKind::CD, d, m),
                   make_coherent_step(PumpVariant::SE0, p, d, m), make_dissipative_step(ChannelKind::CD, d, m),
                   make_coherent_step(PumpVariant::EP0, p, d, m), make_dissipative_step(ChannelKind::UCD, d, m)};
    return proto;
}

Protocol make_conversion_II(const LaserParams& p, const DecayParams& d, const ModelOptions& m) {
    Protocol proto;
    proto.label = ProtocolLabel::ConversionII;
    proto.laser = p;
    proto.decay = d;
    proto.model = m;
    proto.steps = {make_coherent_step(PumpVariant::SE0, p, d, m), make_dissipative_step(ChannelKind::UCD, d, m),
                   make_coherent_step(PumpVariant::SE1, p, d, m), make_dissipative_step(ChannelKind::UCD, d, m),
                   make_coherent_step(PumpVariant::SEplus, p, d, m), make_dissipative_step(ChannelKind::UCD, d, m)};
    return proto;
}

Protocol make_conversion(ProtocolLabel l, const LaserParams& p, const DecayParams& d, const ModelOptions& m) {
    return l == ProtocolLabel::ConversionI ? make_conversion_I(p, d, m) : make_conversion_II(p, d, m);
}

Vector target_state(ProtocolLabel l) { return named_state(l == ProtocolLabel::ConversionI ? "W0" : "GHZ-"); }

Vector source_state(ProtocolLabel l) { return named_state(l == ProtocolLabel::ConversionI ? "GHZ-" : "W0"); }

Trajectory run_cycles(const Operator& rho0, const Protocol& protocol, int n_cycles, const RunOptions& opts) {
    if (n_cycles < 1) throw InvalidInput("run_cycles: n_cycles must be at least 1");
    if (opts.samples_per_step < 1) throw InvalidInput("run_cycles: samples_per_step must be at least 1");
    if (protocol.steps.empty()) throw InvalidInput("run_cycles: empty protocol");

    std::shared_ptr<const NoiseTrace> global_trace;
    if (protocol.noise && protocol.noise_mode == NoiseMode::Continuous) {
        global_trace = std::make_shared<const NoiseTrace>(
            phase_noise_trace(*protocol.noise, protocol.period() * n_cycles));
    }

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);
    Operator rho = rho0;
    double t0 = 0.0;
    const size_t nsteps = protocol.steps.size();
    const Operator n_r = rydberg_number();

    for (int c = 0; c < n_cycles; ++c) {
        for (size_t k = 0; k < nsteps; ++k) {
            const ProtocolStep& step = protocol.steps[k];
            const bool noisy = protocol.noise && step.kind == StepKind::Coherent && protocol.noise->h0 > 0.0;
            Trajectory part;
            if (step.constant_generator() && !noisy) {
                part = propagate_const(rho, step.hamiltonian(), step.all_channels(), step.duration,
                                       opts.samples_per_step, opts.cache);
            } else {
                std::shared_ptr<const NoiseTrace> trace;
                double offset = 0.0;
                if (noisy && protocol.noise_mode == NoiseMode::PerStep) {
                    PhaseNoiseSpec spec = *protocol.noise;
                    spec.seed = derive_seed(protocol.noise->seed, static_cast<std::uint64_t>(c) * nsteps + k);
                    trace = std::make_shared<const NoiseTrace>(phase_noise_trace(spec, step.duration));
                } else if (noisy) {
                    trace = global_trace;
                    offset = t0;
                }
                const PulseShape pulse = step.pulse;
                Drive drive;
                drive.h0 = step.h_rest;
                if (step.detuning != 0.0) drive.h0 += step.detuning * n_r;
                drive.raising = step.raising;
                drive.envelope = [pulse, trace, offset](double t) -> cplx {
                    const double a = pulse.envelope(t);
                    if (!trace) return a;
                    return a * std::exp(I * trace->phase(offset + t));
                };
                RkOptions rk = opts.rk;
                rk.samples = opts.samples_per_step;
                if (trace) {
                    const double first = std::ceil(offset / trace->dt) * trace->dt - offset;
                    for (double b = first; b < step.duration; b += trace->dt) rk.breakpoints.push_back(b);
                }
                part = propagate_drive(rho, drive, step.all_channels(), step.duration, rk);
            }
            for (size_t q = 1; q < part.states.size(); ++q) {
                traj.times.push_back(t0 + part.times[q]);
                traj.states.push_back(part.states[q]);
            }
            rho = part.states.back();
            t0 += step.duration;
        }
    }
    return traj;
}

std::vector<Operator> cycle_end_states(const Trajectory& traj, const Protocol& protocol, int samples_per_step) {
    const size_t per_cycle = protocol.steps.size() * static_cast<size_t>(samples_per_step);
    std::vector<Operator> out;
    for (size_t idx = per_cycle; idx < traj.states.size(); idx += per_cycle) out.push_back(traj.states[idx]);
    return out;
}

Matrix period_propagator(const Protocol& protocol, PropagatorCache* cache) {
    if (protocol.noise && protocol.noise->h0 > 0.0) {
        throw InvalidInput("period propagator needs a noiseless protocol");
    }
    Matrix p = identity(kDim * kDim);
    for (const auto& step : protocol.steps) {
        if (!step.constant_generator()) {
            throw InvalidInput("period propagator needs constant step generators (rectangular pulses)");
        }
        const SuperOperator l = liouvillian(step.hamiltonian(), step.all_channels());
        if (cache) {
            p = (*cache->get(l, step.duration)) * p;
        } else {
            p = matrix_exp(l, step.duration) * p;
        }
    }
    return p;
}

EffectiveGenerator effective_liouvillian_checked(const Protocol& protocol, PropagatorCache* cache,
                                                 const LogOptions& opts) {
    EffectiveGenerator out;
    out.propagator = period_propagator(protocol, cache);
    out.log = matrix_log_checked(out.propagator, protocol.period(), opts);
    out.generator = out.log.generator;
    return out;
}

SuperOperator effective_liouvillian(const Protocol& protocol, PropagatorCache* cache) {
    return effective_liouvillian_checked(protocol, cache).generator;
}

namespace {

SpectrumResult analyze_spectrum(Vector values, Matrix vectors, const Vector& target) {
    std::vector<Eigen::Index> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a).real() > values(b).real(); });
    SpectrumResult res;
    res.eigenvalues.resize(values.size());
    Matrix sorted(vectors.rows(), vectors.cols());
    for (size_t k = 0; k < order.size(); ++k) {
        res.eigenvalues(k) = values(order[k]);
        sorted.col(k) = vectors.col(order[k]);
    }
    Eigen::Index zero = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < res.eigenvalues.size(); ++k) {
        const double mag = std::abs(res.eigenvalues(k));
        if (mag < 1e-8) ++res.zero_modes;
        if (mag < best) {
            best = mag;
            zero = k;
        }
    }
    if (res.zero_modes != 1) {
        std::ostringstream msg;
        msg << "steady state is not unique: " << res.zero_modes
            << " eigenvalues below 1e-8 in modulus (smallest " << best << ")";
        throw NonUniqueSteadyState(msg.str());
    }
    Operator rho = devectorize(sorted.col(zero));
    rho /= rho.trace();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> herm(rho);
    Eigen::VectorXd w = herm.eigenvalues();
    res.min_eigenvalue = w.minCoeff();
    w = w.cwiseMax(0.0);
    w /= w.sum();
    res.steady_state = herm.eigenvectors() * w.cast<cplx>().asDiagonal() * herm.eigenvectors().adjoint();
    res.purity = purity(res.steady_state);
    res.target_population = observe(res.steady_state, target);

    double second = 0.0;
    bool found = false;
    for (Eigen::Index k = 0; k < res.eigenvalues.size(); ++k) {
        if (k == zero) continue;
        second = std::abs(res.eigenvalues(k).real());
        found = true;
        break;
    }
    res.spectral_gap = found ? second : 0.0;
    return res;
}

}  // namespace

SpectrumResult steady_state_analysis(const SuperOperator& l_eff, const Vector& target) {
    EigenSystem es = eig(l_eff);
    return analyze_spectrum(std::move(es.values), std::move(es.vectors), target);
}

SpectrumResult floquet_steady_state(const Matrix& propagator, double period, const Vector& target) {
    if (!(period > 0.0)) throw InvalidInput("floquet_steady_state: period must be positive");
    EigenSystem es = eig(propagator);
    // Vanishing multipliers map to a finite, strongly damped rate.
    const double floor = std::numeric_limits<double>::min();
    for (Eigen::Index k = 0; k < es.values.size(); ++k) {
        const cplx mu = es.values(k);
        es.values(k) = cplx(std::log(std::max(std::abs(mu), floor)), std::arg(mu)) / period;
    }
    return analyze_spectrum(std::move(es.values), std::move(es.vectors), target);
}

std::vector<SweepPoint> sweep_ratio(ProtocolLabel family, const LaserParams& p, const DecayParams& d,
                                    const std::vector<double>& ratios, const ModelOptions& m, int threads) {
    std::vector<SweepPoint> out(ratios.size());
    for (size_t k = 0; k < ratios.size(); ++k) {
        if (!(ratios[k] > 0.0) || ratios[k] > 0.1) throw InvalidInput("sweep ratios must lie in (0, 0.1]");
        out[k].ratio = ratios[k];
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t k = next++; k < ratios.size(); k = next++) {
            try {
                LaserParams q = p;
                q.omega2 = ratios[k] * p.omega1;
                const Protocol proto = make_conversion(family, q, d, m);
                out[k].result = floquet_steady_state(period_propagator(proto), proto.period(), target_state(family));
            } catch (const std::exception& e) {
                out[k].error = e.what();
            }
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(ratios.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace flsim
