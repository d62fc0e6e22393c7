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

#include <string>
#include <utility>

#include "flsim/linalg.hpp"

namespace flsim {

// Three atoms with levels |0>, |1>, |r>. Basis kets |ijk> are ordered
// atom-major and lexicographically in (0, 1, r): index = 9 i + 3 j + k.
inline constexpr int kLevels = 3;
inline constexpr int kAtoms = 3;
inline constexpr int kDim = 27;
inline constexpr int kG0 = 0;
inline constexpr int kG1 = 1;
inline constexpr int kRyd = 2;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Angular frequency from a value quoted in MHz (2*pi*MHz -> rad/s).
constexpr double mhz(double f) { return kTwoPi * 1e6 * f; }
constexpr double khz(double f) { return kTwoPi * 1e3 * f; }
constexpr double us(double t) { return 1e-6 * t; }

enum class PumpVariant { EP0, EP1, SE0, SE1, SEplus };

std::string to_string(PumpVariant v);
PumpVariant pump_variant_from_string(const std::string& s);

struct LaserParams {
    double omega1 = mhz(4.0);
    double omega2 = mhz(0.04);
    double delta = mhz(200.0);
    PumpVariant variant = PumpVariant::EP0;

    /// Throws InvalidInput on non-positive drives. Returns false (a warning)
    /// when omega2/omega1 exceeds the effective-operator range.
    bool validate() const;
};

struct VdwParams {
    double c6 = 0.0;    // rad/s * um^6
    double r0 = 0.0;    // um
    double urr = 0.0;   // rad/s

    static VdwParams from_c6(double c6, double r0);
    /// Pick C6 so that U_rr(r0) equals urr.
    static VdwParams from_urr(double urr, double r0);
};

/// Default geometry: U_rr = Delta = 2pi x 200 MHz at R0 = 5.2445 um.
VdwParams default_vdw();

struct TwoPhotonParams {
    double omega_a = 0.0;
    double omega_b = 0.0;
    double delta1 = 0.0;
};

enum class Frame { Interaction, Static };

int basis_index(int i, int j, int k);
Vector ket(int i, int j, int k);

/// Labels: GHZ+, GHZ-, W0, W0', W0'', W1, W1', W1'', D0, D1, psi0_1..3,
/// psi1_1..3, three-character kets over {0,1,r} ("0r1") and product
/// kets over {+,-,r} ("+--").
Vector named_state(const std::string& label);
Operator projector(const Vector& psi);

/// Single-atom |a><b| (3x3).
Operator sigma(int a, int b);
/// op (3x3) acting on atom j in the 27-dimensional space.
Operator site_op(const Operator& op, int atom);
/// Number of Rydberg excitations, sum_j P^r_j.
Operator rydberg_number();
/// Number of Rydberg pairs, sum_{j<k} P^r_j P^r_k.
Operator rydberg_pairs();

/// Facilitated strong drive on |level> <-> |r>: atom j is driven only when
/// exactly one partner is in |r> and the other is in a ground level.
Operator strong_coupling(double omega1, int level);
/// Weak drive on |level> <-> |r> with both partners in ground levels.
Operator weak_coupling(double omega2, int level);

/// Change of basis |0>,|1> -> |+>,|->, |r> kept, on all three atoms.
Operator plus_minus_basis();

Operator build_effective_hamiltonian(const LaserParams& p);

/// Full three-atom Hamiltonian. The interaction frame is the literal form with
/// e^{-i Delta t} on the strong terms and U_rr on doubly excited pairs. The
/// static frame removes exp(-i Delta t N_pairs), leaving
/// H_strong + H_weak + (U_rr - Delta) N_pairs; with retain_stark the
/// remaining oscillating terms are kept, which makes the two frames
/// unitarily equivalent through a diagonal transformation.
Operator build_full_hamiltonian(const LaserParams& p, const VdwParams& v, Frame frame, double t,
                                bool retain_stark = false);

/// Part of the Hamiltonian carried by the weak field that raises a ground
/// level into |r>. H = h_rest + W + W^dag.
Operator weak_raising_part(const LaserParams& p, bool full);

/// P0 h_weak P0 with P0 the null space of h_strong.
Operator zeno_project(const Operator& h_strong, const Operator& h_weak);

/// Effective (omega1, omega2) from a two-photon ladder.
std::pair<double, double> two_photon_reduce(const TwoPhotonParams& tp, double delta);

}  // namespace flsim
