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

#include "flsim/dissipation.hpp"

#include <cmath>

#include "flsim/errors.hpp"

namespace flsim {

double DecayParams::Gamma1() const { return omega_d1 * omega_d1 / gamma1; }
double DecayParams::Gamma2() const { return omega_d2 * omega_d2 / gamma2; }
double DecayParams::Gamma3() const { return Gamma2() * gamma3 / gamma2; }

bool DecayParams::validate() const {
    for (double x : {gamma1, gamma2, gamma3, omega_d1, omega_d2, omega_d3, gamma_r}) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("decay parameters must be finite and nonnegative");
    }
    for (double g : {gamma1, gamma2, gamma3}) {
        if (g == 0.0) throw InvalidInput("intermediate-state decay rates must be positive");
    }
    const double eps = 1e-12;
    return omega_d1 / gamma1 <= 0.2 + eps && omega_d2 / gamma2 <= 0.2 + eps && omega_d3 / gamma3 <= 0.2 + eps;
}

std::string to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::CD: return "CD";
        case ChannelKind::UCD: return "UCD";
        case ChannelKind::NaturalRydberg: return "natural";
    }
    return "?";
}

std::map<int, double> EngineeredChannelSpec::resolved_branching() const {
    std::map<int, double> b = branching;
    if (b.empty()) {
        if (kind == ChannelKind::CD) b = {{kG0, 1.0}};
        else b = {{kG0, 0.5}, {kG1, 0.5}};
    }
    double total = 0.0;
    for (const auto& [level, frac] : b) {
        if (level != kG0 && level != kG1) throw InvalidInput("branching targets must be ground levels");
        if (frac < 0.0) throw InvalidInput("branching fractions must be nonnegative");
        total += frac;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("branching fractions must sum to 1");
    return b;
}

std::vector<JumpChannel> effective_channels(const EngineeredChannelSpec& spec, const DecayParams& d) {
    d.validate();
    double total = 0.0;
    switch (spec.kind) {
        case ChannelKind::CD: total = d.Gamma1(); break;
        case ChannelKind::UCD: total = d.Gamma2(); break;
        case ChannelKind::NaturalRydberg: total = d.gamma_r; break;
    }
    std::vector<JumpChannel> out;
    if (total == 0.0) return out;
    for (const auto& [level, frac] : spec.resolved_branching()) {
        if (frac == 0.0) continue;
        for (int j = 0; j < kAtoms; ++j) out.emplace_back(site_op(sigma(level, kRyd), j), total * frac);
    }
    return out;
}

std::vector<JumpChannel> effective_channels(ChannelKind kind, const DecayParams& d) {
    return effective_channels(EngineeredChannelSpec{kind, {}}, d);
}

int SingleAtomModel::index(const std::string& level) const {
    for (size_t k = 0; k < levels.size(); ++k) {
        if (levels[k] == level) return static_cast<int>(k);
    }
    throw InvalidInput("unknown level " + level);
}

namespace {

Operator ketbra(int n, int a, int b) {
    Operator m = Operator::Zero(n, n);
    m(a, b) = 1.0;
    return m;
}

void add_channel(std::vector<JumpChannel>& chans, int n, int to, int from, double rate) {
    if (rate > 0.0) chans.emplace_back(ketbra(n, to, from), rate);
}

}  // namespace

SingleAtomModel full_cd_model(const DecayParams& d) {
    d.validate();
    SingleAtomModel m{{"r", "p1", "0", "1"}, Operator::Zero(4, 4), {}};
    m.hamiltonian(0, 1) = 0.5 * d.omega_d1;
    m.hamiltonian(1, 0) = 0.5 * d.omega_d1;
    add_channel(m.channels, 4, 2, 1, d.gamma1);
    return m;
}

SingleAtomModel effective_cd_model(const DecayParams& d) {
    d.validate();
    SingleAtomModel m{{"r", "0", "1"}, Operator::Zero(3, 3), {}};
    add_channel(m.channels, 3, 1, 0, d.Gamma1());
    return m;
}

SingleAtomModel full_ucd_model(const DecayParams& d) {
    d.validate();
    SingleAtomModel m{{"r", "p3", "p4", "0", "1", "alpha"}, Operator::Zero(6, 6), {}};
    m.hamiltonian(0, 1) = m.hamiltonian(1, 0) = 0.5 * d.omega_d2;
    m.hamiltonian(5, 2) = m.hamiltonian(2, 5) = 0.5 * d.omega_d3;
    add_channel(m.channels, 6, 3, 1, d.gamma2 / 3.0);
    add_channel(m.channels, 6, 4, 1, d.gamma2 / 2.0);
    add_channel(m.channels, 6, 5, 1, d.gamma2 / 6.0);
    add_channel(m.channels, 6, 3, 2, d.gamma3 / 3.0);
    add_channel(m.channels, 6, 5, 2, 2.0 * d.gamma3 / 3.0);
    return m;
}

SingleAtomModel effective_ucd_model(const DecayParams& d) {
    d.validate();
    const double g2 = d.Gamma2(), g3 = d.Gamma3();
    SingleAtomModel m{{"r", "0", "1", "alpha"}, Operator::Zero(4, 4), {}};
    add_channel(m.channels, 4, 1, 0, g2 / 3.0);
    add_channel(m.channels, 4, 2, 0, g2 / 2.0);
    add_channel(m.channels, 4, 3, 0, g2 / 6.0);
    add_channel(m.channels, 4, 1, 3, g3 / 3.0);
    add_channel(m.channels, 4, 3, 3, 2.0 * g3 / 3.0);
    return m;
}

SingleAtomModel reduced_ucd_model(const DecayParams& d) {
    d.validate();
    SingleAtomModel m{{"r", "0", "1"}, Operator::Zero(3, 3), {}};
    add_channel(m.channels, 3, 1, 0, d.Gamma2() / 2.0);
    add_channel(m.channels, 3, 2, 0, d.Gamma2() / 2.0);
    return m;
}

double cd_ground_population(double Gamma1, double t) { return -std::expm1(-Gamma1 * t); }

double ucd_ground_population(double Gamma2, double Gamma3, double t) {
    const double denom = 6.0 * Gamma2 - 2.0 * Gamma3;
    double alpha = 0.0;
    if (std::abs(denom) <= 1e-12 * std::abs(Gamma2)) {
        alpha = Gamma2 / 6.0 * t * std::exp(-Gamma2 * t);
    } else {
        alpha = Gamma2 / denom * (std::exp(-Gamma3 * t / 3.0) - std::exp(-Gamma2 * t));
    }
    return -std::expm1(-Gamma2 * t) - alpha;
}

double decay_duration(double target, ChannelKind kind, const DecayParams& d) {
    if (!(target > 0.0) || !(target < 1.0)) throw InvalidInput("decay_duration: target must lie in (0, 1)");
    d.validate();
    switch (kind) {
        case ChannelKind::CD: return -std::log1p(-target) / d.Gamma1();
        case ChannelKind::NaturalRydberg: return -std::log1p(-target) / d.gamma_r;
        case ChannelKind::UCD: break;
    }
    const double g2 = d.Gamma2(), g3 = d.Gamma3();
    auto pop = [&](double t) { return ucd_ground_population(g2, g3, t); };
    double lo = 0.0, hi = 1.0 / g2;
    while (pop(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6 / g2) throw NumericalError("decay_duration: target not reached");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pop(mid) >= target ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace flsim
