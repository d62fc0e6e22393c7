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

#include <random>

#include "flsim/linalg.hpp"

namespace flsim::testing {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = scale * cplx(g(rng), g(rng));
    }
    return a;
}

inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    const Matrix a = random_matrix(rng, n, scale);
    return 0.5 * (a + a.adjoint());
}

inline Matrix random_density(std::mt19937_64& rng, Eigen::Index n) {
    const Matrix a = random_matrix(rng, n);
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

inline std::vector<JumpChannel> random_channels(std::mt19937_64& rng, Eigen::Index n, int count, double scale) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<JumpChannel> out;
    for (int k = 0; k < count; ++k) out.emplace_back(random_matrix(rng, n, 1.0 / std::sqrt(double(n))), scale * u(rng));
    return out;
}

inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace flsim::testing
