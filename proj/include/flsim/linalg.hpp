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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace flsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Hilbert-space operators (dim x dim) and superoperators (dim^2 x dim^2)
// share the dense complex matrix type.
using Operator = Matrix;
using SuperOperator = Matrix;

inline constexpr cplx I{0.0, 1.0};

/// Jump operator with a nonnegative rate in rad/s. The dissipator is
/// rate * (c rho c^dag - 1/2 {c^dag c, rho}).
struct JumpChannel {
    Operator op;
    double rate = 0.0;

    JumpChannel() = default;
    JumpChannel(Operator c, double r);
};

Matrix identity(Eigen::Index n);
Matrix kron(const Matrix& a, const Matrix& b);
Matrix dagger(const Matrix& a);

/// max|A - A^dag| < rel_tol * max|A| (an all-zero matrix is Hermitian).
bool is_hermitian(const Matrix& a, double rel_tol = 1e-12);

void require_finite(const Matrix& a, const char* what);
void require_square(const Matrix& a, const char* what);

/// exp(a * t). Returns the identity exactly when a*t vanishes.
Matrix matrix_exp(const Matrix& a, double t);

enum class BranchPolicy {
    /// Refuse propagators with eigenvalues on or next to the branch cut.
    Strict,
    /// Lift vanishing eigenvalues to a small floor and put eigenvalues that
    /// sit on the negative real axis on the +i*pi side of the cut.
    Regularize,
};

struct LogOptions {
    BranchPolicy policy = BranchPolicy::Strict;
    double cut_tol = 1e-12;     // strict: distance to the closed negative real axis
    double floor_rel = 1e-12;   // regularize: |lambda| <= floor_rel * rho(p) is lifted
    double angle_tol = 1e-6;    // regularize: pi - |arg lambda| below this is snapped
};

struct LogResult {
    Matrix generator;           // Log(p) / period
    double round_trip = 0.0;    // max|exp(generator*period) - p| / max|p|
    int lifted = 0;
    int snapped = 0;
};

/// Principal logarithm through a complex Schur form, scaled by 1/period.
LogResult matrix_log_checked(const Matrix& p, double period, const LogOptions& opts = {});
Matrix matrix_log(const Matrix& p, double period, const LogOptions& opts = {});

/// Column stacking: v[i + n*j] = rho(i, j), so vec(A X B) = (B^T kron A) vec(X).
Vector vectorize(const Matrix& rho);
Matrix devectorize(const Vector& v);

/// Lindblad generator acting on column-stacked density matrices:
/// L = -i (1 kron H - H^T kron 1) + sum_k r_k (c_k^* kron c_k
///     - 1/2 1 kron c_k^dag c_k - 1/2 (c_k^dag c_k)^T kron 1).
SuperOperator liouvillian(const Operator& h, const std::vector<JumpChannel>& channels);

/// Direct evaluation of -i[H, rho] + sum_k r_k D[c_k] rho.
Operator lindblad_rhs(const Operator& h, const std::vector<JumpChannel>& channels, const Operator& rho);

struct EigenSystem {
    Vector values;              // sorted by real part, descending
    Matrix vectors;             // right eigenvectors, unit 2-norm columns
    double max_residual = 0.0;  // max_k |A v_k - lambda_k v_k| / |A|
};

EigenSystem eig(const Matrix& a);

}  // namespace flsim
