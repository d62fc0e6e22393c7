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

#include "flsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "flsim/errors.hpp"

namespace flsim {

JumpChannel::JumpChannel(Operator c, double r) : op(std::move(c)), rate(r) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw InvalidInput("jump channel rate must be finite and nonnegative");
    }
    require_square(op, "jump operator");
}

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix dagger(const Matrix& a) { return a.adjoint(); }

bool is_hermitian(const Matrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() < rel_tol * scale;
}

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) {
        throw InvalidInput(std::string(what) + ": non-finite entries");
    }
}

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        std::ostringstream msg;
        msg << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
        throw DimensionMismatch(msg.str());
    }
}

Matrix matrix_exp(const Matrix& a, double t) {
    require_square(a, "matrix_exp");
    require_finite(a, "matrix_exp");
    if (!std::isfinite(t)) throw InvalidInput("matrix_exp: non-finite time");
    if (t == 0.0 || a.isZero(0.0)) return identity(a.rows());
    Matrix at = a * t;
    return at.exp();
}

namespace {

double distance_to_cut(cplx z) {
    return z.real() <= 0.0 ? std::abs(z.imag()) : std::abs(z);
}

}  // namespace

LogResult matrix_log_checked(const Matrix& p, double period, const LogOptions& opts) {
    require_square(p, "matrix_log");
    require_finite(p, "matrix_log");
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw InvalidInput("matrix_log: period must be positive");
    }
    const Eigen::Index n = p.rows();
    LogResult res;
    if (p.isIdentity(0.0)) {
        res.generator = Matrix::Zero(n, n);
        return res;
    }

    Eigen::ComplexSchur<Matrix> schur(p);
    if (schur.info() != Eigen::Success) {
        throw NumericalError("matrix_log: Schur decomposition did not converge");
    }
    Matrix t = schur.matrixT();
    const Matrix& u = schur.matrixU();

    double radius = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) radius = std::max(radius, std::abs(t(k, k)));
    if (radius > 1.0 + 1e-8) {
        std::ostringstream msg;
        msg << "matrix_log: spectral radius " << radius << " exceeds 1 + 1e-8";
        throw InvalidInput(msg.str());
    }

    if (opts.policy == BranchPolicy::Strict) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (distance_to_cut(t(k, k)) < opts.cut_tol) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "matrix_log: eigenvalue " << t(k, k)
                    << " lies on the branch cut of the principal logarithm";
                throw BranchAmbiguity(msg.str());
            }
        }
    } else {
        const double floor = opts.floor_rel * radius;
        for (Eigen::Index k = 0; k < n; ++k) {
            const cplx d = t(k, k);
            if (std::abs(d) <= floor) {
                t(k, k) = floor;
                ++res.lifted;
            } else if (M_PI - std::abs(std::arg(d)) < opts.angle_tol) {
                t(k, k) = -std::abs(d);
                ++res.snapped;
            }
        }
    }

    Matrix lt = t.log();
    if (!lt.allFinite()) {
        throw NumericalError("matrix_log: logarithm of the Schur factor is not finite");
    }
    res.generator = u * lt * u.adjoint() / period;

    Matrix back = matrix_exp(res.generator, period);
    res.round_trip = (back - p).cwiseAbs().maxCoeff() / p.cwiseAbs().maxCoeff();
    return res;
}

Matrix matrix_log(const Matrix& p, double period, const LogOptions& opts) {
    return matrix_log_checked(p, period, opts).generator;
}

Vector vectorize(const Matrix& rho) {
    require_square(rho, "vectorize");
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix devectorize(const Vector& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n == 0 || n * n != v.size()) {
        throw InvalidInput("devectorize: length is not a positive perfect square");
    }
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

SuperOperator liouvillian(const Operator& h, const std::vector<JumpChannel>& channels) {
    require_square(h, "liouvillian");
    const Eigen::Index n = h.rows();
    Matrix k = Matrix::Zero(n, n);
    for (const auto& ch : channels) {
        if (ch.op.rows() != n) {
            throw DimensionMismatch("liouvillian: channel dimension differs from the Hamiltonian");
        }
        k += ch.rate * ch.op.adjoint() * ch.op;
    }
    // Left action A rho -> (1 kron A), right action rho B -> (B^T kron 1).
    const Matrix left = -I * h - 0.5 * k;
    const Matrix right = (I * h - 0.5 * k).transpose();

    SuperOperator l = SuperOperator::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        l.block(j * n, j * n, n, n) += left;
        for (Eigen::Index m = 0; m < n; ++m) {
            if (right(j, m) != 0.0) {
                l.block(j * n, m * n, n, n).diagonal().array() += right(j, m);
            }
        }
    }
    for (const auto& ch : channels) {
        if (ch.rate == 0.0) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index m = 0; m < n; ++m) {
                const cplx c = std::conj(ch.op(j, m));
                if (c != 0.0) l.block(j * n, m * n, n, n) += ch.rate * c * ch.op;
            }
        }
    }
    return l;
}

Operator lindblad_rhs(const Operator& h, const std::vector<JumpChannel>& channels, const Operator& rho) {
    Operator out = -I * (h * rho - rho * h);
    for (const auto& ch : channels) {
        const Matrix cd = ch.op.adjoint();
        const Matrix cdc = cd * ch.op;
        out += ch.rate * (ch.op * rho * cd - 0.5 * (cdc * rho + rho * cdc));
    }
    return out;
}

EigenSystem eig(const Matrix& a) {
    require_square(a, "eig");
    require_finite(a, "eig");
    Eigen::ComplexEigenSolver<Matrix> solver(a, true);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eig: QR iteration did not converge for a " + std::to_string(a.rows()) +
                             "-dimensional matrix");
    }
    const Vector& vals = solver.eigenvalues();
    const Matrix& vecs = solver.eigenvectors();

    std::vector<Eigen::Index> order(static_cast<size_t>(vals.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return vals(x).real() > vals(y).real();
    });

    EigenSystem out;
    out.values.resize(vals.size());
    out.vectors.resize(a.rows(), a.cols());
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
        out.values(k) = vals(order[static_cast<size_t>(k)]);
        out.vectors.col(k) = vecs.col(order[static_cast<size_t>(k)]).normalized();
    }

    const double scale = std::max(a.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const Matrix resid = a * out.vectors - out.vectors * out.values.asDiagonal();
    out.max_residual = resid.colwise().norm().maxCoeff() / scale;
    if (out.max_residual > 1e-8) {
        std::ostringstream msg;
        msg << "eig: residual " << out.max_residual << " above 1e-8 relative to |A|";
        throw NumericalError(msg.str());
    }
    return out;
}

}  // namespace flsim
