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

#include "flsim/atoms.hpp"

#include <array>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "flsim/errors.hpp"

namespace flsim {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

Vector lab(const char* s) {
    std::array<int, 3> lv{};
    for (int a = 0; a < 3; ++a) {
        switch (s[a]) {
            case '0': lv[static_cast<size_t>(a)] = kG0; break;
            case '1': lv[static_cast<size_t>(a)] = kG1; break;
            case 'r': lv[static_cast<size_t>(a)] = kRyd; break;
            default: throw InvalidInput(std::string("bad ket label ") + s);
        }
    }
    return ket(lv[0], lv[1], lv[2]);
}

Vector unit(const Vector& v) { return v / v.norm(); }

Vector single_level(char c) {
    Vector v = Vector::Zero(3);
    switch (c) {
        case '0': v(kG0) = 1.0; break;
        case '1': v(kG1) = 1.0; break;
        case 'r': v(kRyd) = 1.0; break;
        case '+': v(kG0) = 1.0 / kSqrt2; v(kG1) = 1.0 / kSqrt2; break;
        case '-': v(kG0) = 1.0 / kSqrt2; v(kG1) = -1.0 / kSqrt2; break;
        default: throw InvalidInput(std::string("bad single-atom label ") + c);
    }
    return v;
}

Vector product3(const Vector& a, const Vector& b, const Vector& c) {
    return kron(kron(a, b), c);
}

Operator outer(const Vector& a, const Vector& b) { return a * b.adjoint(); }

Operator herm(const Operator& a) { return a + a.adjoint(); }

Operator level_projector(int a) { return sigma(a, a); }

Operator ground_projector() { return level_projector(kG0) + level_projector(kG1); }

// Operator a_j (x) b_{j+1} (x) c_{j+2} with cyclic atom labels.
Operator cyclic(const Operator& a, const Operator& b, const Operator& c, int j) {
    std::array<Operator, 3> ops;
    ops[static_cast<size_t>(j % 3)] = a;
    ops[static_cast<size_t>((j + 1) % 3)] = b;
    ops[static_cast<size_t>((j + 2) % 3)] = c;
    return kron(kron(ops[0], ops[1]), ops[2]);
}

// Single-atom |r><g| for an (unnormalized) ground-level vector g.
Operator raise_from(const Vector& g) {
    Vector r = Vector::Zero(3);
    r(kRyd) = 1.0;
    return r * g.adjoint();
}

struct DriveLevels {
    Vector strong;  // ground combination coupled by Omega_1
    Vector weak;    // ground combination coupled by Omega_2
};

DriveLevels drive_levels(PumpVariant v) {
    Vector g0 = Vector::Zero(3), g1 = Vector::Zero(3);
    g0(kG0) = 1.0;
    g1(kG1) = 1.0;
    switch (v) {
        case PumpVariant::EP0: return {g1, g0};
        case PumpVariant::EP1: return {g0, g1};
        case PumpVariant::SE0: return {g0, g0};
        case PumpVariant::SE1: return {g1, g1};
        case PumpVariant::SEplus: return {g0 + g1, g0 + g1};
    }
    throw InvalidInput("unknown pump variant");
}

Vector ground_vector(int level) {
    if (level != kG0 && level != kG1) throw InvalidInput("drive level must be 0 or 1");
    Vector g = Vector::Zero(3);
    g(level) = 1.0;
    return g;
}

Operator strong_raising(double omega1, const Vector& g) {
    const Operator pr = level_projector(kRyd), pg = ground_projector();
    Operator out = Operator::Zero(kDim, kDim);
    const Operator s = raise_from(g);
    for (int j = 0; j < 3; ++j) out += cyclic(s, pr, pg, j) + cyclic(s, pg, pr, j);
    return 0.5 * omega1 * out;
}

Operator weak_raising(double omega2, const Vector& g) {
    const Operator pg = ground_projector();
    Operator out = Operator::Zero(kDim, kDim);
    const Operator s = raise_from(g);
    for (int j = 0; j < 3; ++j) out += cyclic(s, pg, pg, j);
    return 0.5 * omega2 * out;
}

Operator all_atoms(const Operator& single) {
    Operator out = Operator::Zero(kDim, kDim);
    for (int j = 0; j < 3; ++j) out += site_op(single, j);
    return out;
}

// Effective raising parts (single-Rydberg sector <- ground sector).
Operator effective_raising(PumpVariant v, double o2) {
    auto S = [](const char* l) { return named_state(l); };
    switch (v) {
        case PumpVariant::EP0:
            return kSqrt3 * o2 / 2.0 * outer(S("D0"), S("000")) -
                   kSqrt3 * o2 / 4.0 * outer(S("psi0_2") + S("psi0_3"), S("W0'")) -
                   o2 / 4.0 * outer(2.0 * S("psi0_1") + S("psi0_2") - S("psi0_3"), S("W0''"));
        case PumpVariant::EP1:
            return kSqrt3 * o2 / 2.0 * outer(S("D1"), S("111")) -
                   kSqrt3 * o2 / 4.0 * outer(S("psi1_2") + S("psi1_3"), S("W1'")) -
                   o2 / 4.0 * outer(2.0 * S("psi1_1") + S("psi1_2") - S("psi1_3"), S("W1''"));
        case PumpVariant::SE0:
            return o2 / 2.0 * (outer(S("r11"), S("011")) + outer(S("1r1"), S("101")) + outer(S("11r"), S("110")));
        case PumpVariant::SE1:
            return o2 / 2.0 * (outer(S("r00"), S("100")) + outer(S("0r0"), S("010")) + outer(S("00r"), S("001")));
        case PumpVariant::SEplus:
            return o2 / kSqrt2 * (outer(S("r--"), S("+--")) + outer(S("-r-"), S("-+-")) + outer(S("--r"), S("--+")));
    }
    throw InvalidInput("unknown pump variant");
}

}  // namespace

std::string to_string(PumpVariant v) {
    switch (v) {
        case PumpVariant::EP0: return "EP0";
        case PumpVariant::EP1: return "EP1";
        case PumpVariant::SE0: return "SE0";
        case PumpVariant::SE1: return "SE1";
        case PumpVariant::SEplus: return "SE+";
    }
    return "?";
}

PumpVariant pump_variant_from_string(const std::string& s) {
    static const std::map<std::string, PumpVariant> table{
        {"EP0", PumpVariant::EP0}, {"EP1", PumpVariant::EP1}, {"SE0", PumpVariant::SE0},
        {"SE1", PumpVariant::SE1}, {"SE+", PumpVariant::SEplus}, {"SEplus", PumpVariant::SEplus}};
    auto it = table.find(s);
    if (it == table.end()) throw InvalidInput("unknown pump variant " + s);
    return it->second;
}

bool LaserParams::validate() const {
    if (!(omega1 > 0.0) || !(omega2 > 0.0) || !std::isfinite(omega1) || !std::isfinite(omega2)) {
        throw InvalidInput("laser drives must be positive");
    }
    return omega2 / omega1 <= 0.025;
}

VdwParams VdwParams::from_c6(double c6, double r0) {
    if (!(r0 > 0.0)) throw InvalidInput("interatomic distance must be positive");
    return {c6, r0, c6 / std::pow(r0, 6)};
}

VdwParams VdwParams::from_urr(double urr, double r0) {
    if (!(r0 > 0.0)) throw InvalidInput("interatomic distance must be positive");
    return {urr * std::pow(r0, 6), r0, urr};
}

VdwParams default_vdw() { return VdwParams::from_urr(mhz(200.0), 5.2445); }

int basis_index(int i, int j, int k) {
    for (int l : {i, j, k}) {
        if (l < 0 || l >= kLevels) throw InvalidInput("level index out of range");
    }
    return 9 * i + 3 * j + k;
}

Vector ket(int i, int j, int k) {
    Vector v = Vector::Zero(kDim);
    v(basis_index(i, j, k)) = 1.0;
    return v;
}

Vector named_state(const std::string& label) {
    static const std::map<std::string, Vector> table = [] {
        std::map<std::string, Vector> m;
        m["GHZ+"] = unit(lab("000") + lab("111"));
        m["GHZ-"] = unit(lab("000") - lab("111"));
        m["W0"] = unit(lab("100") + lab("010") + lab("001"));
        m["W0'"] = unit(2.0 * lab("100") - lab("010") - lab("001"));
        m["W0''"] = unit(lab("010") - lab("001"));
        m["W1"] = unit(lab("110") + lab("101") + lab("011"));
        m["W1'"] = unit(2.0 * lab("011") - lab("101") - lab("110"));
        m["W1''"] = unit(lab("101") - lab("110"));
        m["D0"] = unit(lab("r00") + lab("0r0") + lab("00r"));
        m["D1"] = unit(lab("r11") + lab("1r1") + lab("11r"));
        m["psi0_1"] = unit(lab("0r1") - lab("01r"));
        m["psi0_2"] = unit(lab("r01") - lab("10r"));
        m["psi0_3"] = unit(lab("r10") - lab("1r0"));
        m["psi1_1"] = unit(lab("1r0") - lab("10r"));
        m["psi1_2"] = unit(lab("r10") - lab("01r"));
        m["psi1_3"] = unit(lab("r01") - lab("0r1"));
        return m;
    }();
    auto it = table.find(label);
    if (it != table.end()) return it->second;
    if (label.size() == 3) {
        return product3(single_level(label[0]), single_level(label[1]), single_level(label[2]));
    }
    throw InvalidInput("unknown state label " + label);
}

Operator projector(const Vector& psi) { return psi * psi.adjoint(); }

Operator sigma(int a, int b) {
    if (a < 0 || a >= kLevels || b < 0 || b >= kLevels) throw InvalidInput("level index out of range");
    Operator s = Operator::Zero(kLevels, kLevels);
    s(a, b) = 1.0;
    return s;
}

Operator site_op(const Operator& op, int atom) {
    if (op.rows() != kLevels || op.cols() != kLevels) throw DimensionMismatch("site_op expects a 3x3 operator");
    if (atom < 0 || atom >= kAtoms) throw InvalidInput("atom index out of range");
    const Operator id = identity(kLevels);
    std::array<Operator, 3> ops{id, id, id};
    ops[static_cast<size_t>(atom)] = op;
    return kron(kron(ops[0], ops[1]), ops[2]);
}

Operator rydberg_number() { return all_atoms(level_projector(kRyd)); }

Operator rydberg_pairs() {
    const Operator p0 = site_op(level_projector(kRyd), 0);
    const Operator p1 = site_op(level_projector(kRyd), 1);
    const Operator p2 = site_op(level_projector(kRyd), 2);
    return p0 * p1 + p0 * p2 + p1 * p2;
}

Operator strong_coupling(double omega1, int level) { return herm(strong_raising(omega1, ground_vector(level))); }

Operator weak_coupling(double omega2, int level) { return herm(weak_raising(omega2, ground_vector(level))); }

Operator plus_minus_basis() {
    Operator b = Operator::Zero(3, 3);
    b.col(0) = single_level('+');
    b.col(1) = single_level('-');
    b.col(2) = single_level('r');
    return kron(kron(b, b), b);
}

Operator build_effective_hamiltonian(const LaserParams& p) {
    p.validate();
    return herm(effective_raising(p.variant, p.omega2));
}

Operator weak_raising_part(const LaserParams& p, bool full) {
    if (!full) return effective_raising(p.variant, p.omega2);
    return weak_raising(p.omega2, drive_levels(p.variant).weak);
}

Operator build_full_hamiltonian(const LaserParams& p, const VdwParams& v, Frame frame, double t, bool retain_stark) {
    p.validate();
    const DriveLevels lv = drive_levels(p.variant);

    if (frame == Frame::Static && !retain_stark) {
        return herm(strong_raising(p.omega1, lv.strong) + weak_raising(p.omega2, lv.weak)) +
               (v.urr - p.delta) * rydberg_pairs();
    }

    const Operator pairs = rydberg_pairs();
    Operator raise = Operator::Zero(kDim, kDim);
    const cplx phase = std::exp(-I * p.delta * t);
    raise += phase * 0.5 * p.omega1 * all_atoms(raise_from(lv.strong));
    raise += 0.5 * p.omega2 * all_atoms(raise_from(lv.weak));
    Operator h = herm(raise) + v.urr * pairs;
    if (frame == Frame::Interaction) return h;

    // exp(i Delta t N) H exp(-i Delta t N) - Delta N with N the pair count.
    for (int a = 0; a < kDim; ++a) {
        for (int b = 0; b < kDim; ++b) {
            const double dn = (pairs(a, a) - pairs(b, b)).real();
            if (dn != 0.0 && h(a, b) != 0.0) h(a, b) *= std::exp(I * p.delta * t * dn);
        }
    }
    return h - p.delta * pairs;
}

Operator zeno_project(const Operator& h_strong, const Operator& h_weak) {
    require_square(h_strong, "zeno_project");
    if (h_strong.rows() != h_weak.rows() || h_weak.rows() != h_weak.cols()) {
        throw DimensionMismatch("zeno_project: operator dimensions differ");
    }
    if (!is_hermitian(h_strong) || !is_hermitian(h_weak)) {
        throw InvalidInput("zeno_project: operators must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h_strong);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    const double tol = 1e-9 * std::max(scale, 0.0);
    Matrix null_basis(h_strong.rows(), 0);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        if (std::abs(es.eigenvalues()(k)) <= tol) cols.push_back(k);
    }
    if (cols.empty()) throw NumericalError("zeno_project: strong Hamiltonian has no null space");
    null_basis.resize(h_strong.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c) {
        null_basis.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cols[c]);
    }
    const Matrix p0 = null_basis * null_basis.adjoint();
    return p0 * h_weak * p0;
}

std::pair<double, double> two_photon_reduce(const TwoPhotonParams& tp, double delta) {
    if (tp.omega_a < 0.0 || tp.omega_b < 0.0 || !(tp.delta1 > 0.0) || delta < 0.0) {
        throw InvalidInput("two_photon_reduce: inputs must be positive");
    }
    const double d1 = tp.delta1;
    const double omega1 = 2.0 * (2.0 * d1 + delta) * tp.omega_a * tp.omega_a / (8.0 * d1 * (d1 + delta));
    const double omega2 = 2.0 * tp.omega_a * tp.omega_b / (4.0 * d1);
    return {omega1, omega2};
}

}  // namespace flsim
