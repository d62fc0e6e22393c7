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

#include "flsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include <Eigen/Sparse>

#include "flsim/errors.hpp"

namespace flsim {

using Sparse = Eigen::SparseMatrix<cplx>;

TimeGrid TimeGrid::uniform(double t_start, double t_end, int n) {
    if (n < 1 || !(t_end >= t_start)) throw InvalidInput("TimeGrid: need n >= 1 and t_end >= t_start");
    TimeGrid g{t_start, t_end, {}};
    g.samples.reserve(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) g.samples.push_back(t_start + (t_end - t_start) * k / n);
    g.samples.back() = t_end;
    return g;
}

void Trajectory::append(const Trajectory& other, bool skip_first) {
    const size_t start = (skip_first && !states.empty()) ? 1 : 0;
    const double offset = times.empty() ? 0.0 : times.back();
    for (size_t k = start; k < other.states.size(); ++k) {
        times.push_back(offset + other.times[k]);
        states.push_back(other.states[k]);
    }
}

double Trajectory::trace_drift() const {
    double worst = 0.0;
    for (const auto& s : states) worst = std::max(worst, std::abs(s.trace() - 1.0));
    return worst;
}

double Trajectory::hermiticity_drift() const {
    double worst = 0.0;
    for (const auto& s : states) worst = std::max(worst, (s - s.adjoint()).cwiseAbs().maxCoeff());
    return worst;
}

std::uint64_t content_hash(const Matrix& m, double t) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    const Eigen::Index rows = m.rows(), cols = m.cols();
    mix(&rows, sizeof rows);
    mix(&cols, sizeof cols);
    mix(&t, sizeof t);
    mix(m.data(), sizeof(cplx) * static_cast<size_t>(m.size()));
    return h;
}

std::shared_ptr<const Matrix> PropagatorCache::get(const SuperOperator& l, double t) {
    const std::uint64_t key = content_hash(l, t);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = store_.find(key);
        if (it != store_.end()) {
            ++hits_;
            return it->second;
        }
    }
    auto p = std::make_shared<const Matrix>(matrix_exp(l, t));
    std::lock_guard<std::mutex> lock(mutex_);
    return store_.emplace(key, std::move(p)).first->second;
}

size_t PropagatorCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return store_.size();
}

size_t PropagatorCache::hits() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return hits_;
}

namespace {

void check_state(const Operator& rho0) {
    require_square(rho0, "initial state");
    require_finite(rho0, "initial state");
}

void check_dims(const Operator& rho0, const Operator& h, const std::vector<JumpChannel>& channels) {
    if (h.rows() != rho0.rows() || h.cols() != rho0.cols()) {
        throw DimensionMismatch("Hamiltonian and state dimensions differ");
    }
    for (const auto& c : channels) {
        if (c.op.rows() != rho0.rows()) throw DimensionMismatch("channel and state dimensions differ");
    }
}

Sparse to_sparse(const Matrix& m) { return m.sparseView(0.0, 0.0); }

// Shared pieces of the Lindblad right-hand side.
struct Dissipator {
    Sparse k_half;                 // (1/2) sum r c^dag c
    std::vector<Sparse> jumps;     // sqrt(r) c
    std::vector<Sparse> jumps_dag;

    explicit Dissipator(const std::vector<JumpChannel>& channels, Eigen::Index n) {
        Matrix k = Matrix::Zero(n, n);
        for (const auto& ch : channels) {
            if (ch.rate == 0.0) continue;
            const Matrix c = std::sqrt(ch.rate) * ch.op;
            k += 0.5 * c.adjoint() * c;
            jumps.push_back(to_sparse(c));
            jumps_dag.push_back(to_sparse(c.adjoint()));
        }
        k_half = to_sparse(k);
    }

    void add_jumps(const Matrix& rho, Matrix& out) const {
        for (size_t q = 0; q < jumps.size(); ++q) {
            Matrix tmp = jumps[q] * rho;
            out.noalias() += tmp * jumps_dag[q];
        }
    }
};

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

template <class Rhs>
Trajectory dopri45(const Operator& rho0, Rhs&& f, double duration, const RkOptions& opts, RkStats* stats) {
    if (!(duration >= 0.0) || !std::isfinite(duration)) throw InvalidInput("duration must be nonnegative");
    if (opts.samples < 1) throw InvalidInput("samples must be at least 1");
    if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) throw InvalidInput("tolerances must be positive");

    Trajectory traj;
    const TimeGrid grid = TimeGrid::uniform(0.0, duration, opts.samples);
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);
    if (duration == 0.0) {
        for (int k = 0; k < opts.samples; ++k) {
            traj.times.push_back(0.0);
            traj.states.push_back(rho0);
        }
        return traj;
    }

    std::vector<std::pair<double, bool>> stops;  // (time, is_sample)
    for (size_t k = 1; k < grid.samples.size(); ++k) stops.emplace_back(grid.samples[k], true);
    for (double b : opts.breakpoints) {
        if (b > 0.0 && b < duration) stops.emplace_back(b, false);
    }
    std::sort(stops.begin(), stops.end());

    RkStats local;
    Matrix y = rho0, k1(rho0.rows(), rho0.cols()), k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1;
    Matrix ytmp = k1, ynew = k1;
    double t = 0.0;
    f(t, y, k1);
    ++local.rhs_evals;

    double h = opts.initial_step;
    if (h <= 0.0) {
        const double d0 = y.cwiseAbs().maxCoeff(), d1 = k1.cwiseAbs().maxCoeff();
        h = (d1 > 0.0) ? 0.01 * std::max(d0, 1e-5) / d1 : duration;
        h = std::min(h, duration);
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

    size_t next = 0;
    bool last_rejected = false;
    while (next < stops.size()) {
        const double target = stops[next].first;
        double step = std::min(h, target - t);
        bool lands = false;
        if (t + step >= target - 1e-13 * duration) {
            step = target - t;
            lands = true;
        }
        if (step <= 1e-14 * duration) {
            if (lands) {
                if (stops[next].second) {
                    traj.times.push_back(target);
                    traj.states.push_back(y);
                }
                ++next;
                continue;
            }
            std::ostringstream msg;
            msg << "step size underflow at t = " << t << " s";
            throw StiffnessError(msg.str(), t);
        }

        ytmp = y + step * a21 * k1;
        f(t + c2 * step, ytmp, k2);
        ytmp = y + step * (a31 * k1 + a32 * k2);
        f(t + c3 * step, ytmp, k3);
        ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * step, ytmp, k4);
        ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * step, ytmp, k5);
        ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + step, ytmp, k6);
        ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + step, ynew, k7);
        local.rhs_evals += 6;

        const Matrix err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const auto scale =
            (opts.abs_tol + opts.rel_tol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array()).eval();
        const double en = std::sqrt((err.cwiseAbs().array() / scale).square().mean());

        if (!std::isfinite(en)) throw NumericalError("non-finite error estimate in Runge-Kutta step");

        if (en <= 1.0) {
            t = lands ? target : t + step;
            y.swap(ynew);
            k1.swap(k7);
            ++local.accepted;
            double fac = (en == 0.0) ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
            if (last_rejected) fac = std::min(fac, 1.0);
            if (!lands || step >= h) h = step * fac;
            else h = std::max(h, step * fac);
            last_rejected = false;
            if (lands) {
                if (stops[next].second) {
                    traj.times.push_back(target);
                    traj.states.push_back(y);
                }
                ++next;
            }
        } else {
            ++local.rejected;
            h = step * std::max(0.2, 0.9 * std::pow(en, -0.2));
            last_rejected = true;
        }
        if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
        if (local.accepted + local.rejected > opts.max_steps) {
            throw StiffnessError("step budget exhausted", t);
        }
        if (h <= 1e-14 * duration) {
            std::ostringstream msg;
            msg << "step size underflow at t = " << t << " s";
            throw StiffnessError(msg.str(), t);
        }
    }
    if (stats) {
        stats->accepted += local.accepted;
        stats->rejected += local.rejected;
        stats->rhs_evals += local.rhs_evals;
    }
    return traj;
}

}  // namespace

Trajectory propagate_const(const Operator& rho0, const Operator& h, const std::vector<JumpChannel>& channels,
                           double duration, int samples, PropagatorCache* cache) {
    check_state(rho0);
    check_dims(rho0, h, channels);
    if (!(duration >= 0.0) || !std::isfinite(duration)) throw InvalidInput("duration must be nonnegative");
    if (samples < 1) throw InvalidInput("samples must be at least 1");

    const TimeGrid grid = TimeGrid::uniform(0.0, duration, samples);
    Trajectory traj;
    traj.times = grid.samples;
    traj.states.reserve(grid.samples.size());
    traj.states.push_back(rho0);
    if (duration == 0.0) {
        for (int k = 0; k < samples; ++k) traj.states.push_back(rho0);
        return traj;
    }

    const SuperOperator l = liouvillian(h, channels);
    const double dt = duration / samples;
    std::shared_ptr<const Matrix> p = cache ? cache->get(l, dt) : std::make_shared<const Matrix>(matrix_exp(l, dt));
    Vector v = vectorize(rho0);
    for (int k = 0; k < samples; ++k) {
        v = (*p) * v;
        traj.states.push_back(devectorize(v));
    }
    return traj;
}

Trajectory propagate_timedep(const Operator& rho0, const HamiltonianFn& h_of_t,
                             const std::vector<JumpChannel>& channels, double duration, const RkOptions& opts,
                             RkStats* stats) {
    check_state(rho0);
    check_dims(rho0, h_of_t(0.0), channels);
    const Dissipator diss(channels, rho0.rows());
    const Matrix k_half = Matrix(diss.k_half);
    auto f = [&](double t, const Matrix& rho, Matrix& out) {
        const Matrix h = h_of_t(t);
        if (!h.allFinite()) {
            std::ostringstream msg;
            msg << "Hamiltonian is not finite at t = " << t;
            throw NumericalError(msg.str());
        }
        const Matrix heff = h - I * k_half;
        out.noalias() = -I * (heff * rho);
        out.noalias() += I * (rho * heff.adjoint());
        diss.add_jumps(rho, out);
    };
    return dopri45(rho0, f, duration, opts, stats);
}

Trajectory propagate_drive(const Operator& rho0, const Drive& drive, const std::vector<JumpChannel>& channels,
                           double duration, const RkOptions& opts, RkStats* stats) {
    check_state(rho0);
    check_dims(rho0, drive.h0, channels);
    if (drive.raising.rows() != rho0.rows()) throw DimensionMismatch("drive dimensions differ from the state");
    const Dissipator diss(channels, rho0.rows());
    const Sparse left0 = to_sparse(drive.h0) - I * diss.k_half;    // acts from the left with -i
    const Sparse right0 = to_sparse(drive.h0) + I * diss.k_half;   // acts from the right with +i
    const Sparse w = to_sparse(drive.raising);
    const Sparse wd = to_sparse(drive.raising.adjoint());
    Matrix tmp(rho0.rows(), rho0.cols());
    auto f = [&](double t, const Matrix& rho, Matrix& out) {
        const cplx s = drive.envelope ? drive.envelope(t) : cplx(1.0);
        tmp.noalias() = left0 * rho;
        if (s != 0.0) {
            tmp.noalias() += s * (w * rho);
            tmp.noalias() += std::conj(s) * (wd * rho);
        }
        out.noalias() = -I * tmp;
        tmp.noalias() = rho * right0;
        if (s != 0.0) {
            tmp.noalias() += s * (rho * w);
            tmp.noalias() += std::conj(s) * (rho * wd);
        }
        out.noalias() += I * tmp;
        diss.add_jumps(rho, out);
    };
    return dopri45(rho0, f, duration, opts, stats);
}

double observe(const Operator& rho, const Vector& psi) { return (psi.adjoint() * rho * psi)(0, 0).real(); }

double observe(const Operator& rho, const Operator& projector) { return (projector * rho).trace().real(); }

double purity(const Operator& rho) { return (rho * rho).trace().real(); }

void record_population(Trajectory& traj, const std::string& name, const Vector& psi) {
    auto& series = traj.observables[name];
    series.clear();
    for (const auto& s : traj.states) series.push_back(observe(s, psi));
}

void record_purity(Trajectory& traj, const std::string& name) {
    auto& series = traj.observables[name];
    series.clear();
    for (const auto& s : traj.states) series.push_back(purity(s));
}

}  // namespace flsim
