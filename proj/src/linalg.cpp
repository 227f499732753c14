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

#include "capa/linalg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace capa {

double log2_det_identity_plus(const Eigen::MatrixXcd& psd, double noise) {
    if (psd.rows() != psd.cols()) throw std::invalid_argument("log2_det_identity_plus: square matrix required");
    if (!(noise > 0.0)) throw std::invalid_argument("log2_det_identity_plus: noise must be > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(psd, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("log2_det_identity_plus: eigendecomposition failed");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < psd.rows(); ++i) {
        // Roundoff can push tiny PSD eigenvalues slightly negative.
        const double lambda = std::max(eig.eigenvalues()[i], 0.0);
        sum += std::log1p(lambda / noise);
    }
    return sum / std::numbers::ln2;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& mat) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(mat);
    return svd.singularValues();
}

double condition_number(const Eigen::MatrixXcd& mat) {
    const Eigen::VectorXd sv = singular_values(mat);
    const double smin = sv[sv.size() - 1];
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return sv[0] / smin;
}

TopSvd top_singular_triplets(const Eigen::MatrixXcd& mat, int k, int sweeps,
                             std::uint64_t seed, Eigen::Index exact_threshold) {
    if (k < 1) throw std::invalid_argument("top_singular_triplets: k must be >= 1");
    const Eigen::Index cols = mat.cols();
    const Eigen::Index rows = mat.rows();
    const int k_eff = static_cast<int>(std::min<Eigen::Index>(k, std::min(rows, cols)));

    TopSvd out;
    if (rows + cols <= exact_threshold) {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(mat, Eigen::ComputeThinV);
        out.values = svd.singularValues().head(k_eff);
        out.right_vectors = svd.matrixV().leftCols(k_eff);
        return out;
    }

    const Eigen::Index block = std::min<Eigen::Index>(cols, k_eff + 16);
    ComplexGaussian gauss(seed);
    Eigen::MatrixXcd z = gauss.matrix(cols, block);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
        z = qr.householderQ() * Eigen::MatrixXcd::Identity(cols, block);
        z = mat.adjoint() * (mat * z);
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(cols, block);

    // Rayleigh-Ritz on the range of q: SVD of the thin product B q.
    Eigen::BDCSVD<Eigen::MatrixXcd> small_svd(mat * q, Eigen::ComputeThinV);
    out.values = small_svd.singularValues().head(k_eff);
    out.right_vectors = q * small_svd.matrixV().leftCols(k_eff);
    return out;
}

double ComplexGaussian::uniform() {
    // 53-bit mantissa mapped into (0, 1].
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
}

std::complex<double> ComplexGaussian::operator()() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-std::log(u1));  // unit-variance complex Gaussian
    const double angle = 2.0 * M_PI * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

Eigen::MatrixXcd ComplexGaussian::matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = (*this)();
    return m;
}

}  // namespace capa
