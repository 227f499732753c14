// SPDX-License-Identifier: Apache-2.0
//
// capamimo: beamforming optimization library for continuous-aperture MIMO
// Copyright (C) 2026 capamimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CAPA_LINALG_HPP
#define CAPA_LINALG_HPP

#include <cstdint>
#include <complex>
#include <random>

#include <Eigen/Core>

namespace capa {

/// log2 det(I + A / noise) for Hermitian PSD A, via LDLT of the shifted
/// matrix. Small negative eigenvalue noise from roundoff is clamped.
double log2_det_identity_plus(const Eigen::MatrixXcd& psd, double noise);

/// 2-norm condition number from singular values (exact, O(n^3)).
double condition_number(const Eigen::MatrixXcd& mat);

/// Singular values in descending order.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& mat);

struct TopSvd {
    Eigen::VectorXd values;        // descending, size k
    Eigen::MatrixXcd right_vectors;  // cols x k, orthonormal columns
};

/// Top-k singular values and right singular vectors.
///
/// Below `exact_threshold` rows+cols this is an exact thin SVD; above it a
/// seeded randomized subspace iteration with `sweeps` Gram applications and
/// Rayleigh-Ritz extraction. The dominant values converge to machine
/// precision when the spectrum decays; trailing Ritz values are lower bounds.
TopSvd top_singular_triplets(const Eigen::MatrixXcd& mat, int k,
                             int sweeps = 4, std::uint64_t seed = 1234,
                             Eigen::Index exact_threshold = 1024);

/// Deterministic standard complex Gaussian stream. Box-Muller over
/// mt19937_64 with an explicit bit-to-double mapping, so draws are
/// reproducible across platforms (std distributions are not).
class ComplexGaussian {
  public:
    explicit ComplexGaussian(std::uint64_t seed) : engine_(seed) {}
    std::complex<double> operator()();
    Eigen::MatrixXcd matrix(Eigen::Index rows, Eigen::Index cols);

  private:
    double uniform();  // in (0, 1]
    std::mt19937_64 engine_;
};

}  // namespace capa

#endif  // CAPA_LINALG_HPP
