// SPDX-License-Identifier: Apache-2.0
//
// rrmimo - reduced-rank channel estimation library for large-scale MIMO uplinks
// Copyright (C) 2026 rrmimo contributors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "types.hpp"

namespace rrmimo
{

enum class BasisKind
{
    klt,
    dct2,
    dft,
    polynomial,
};

inline const char *to_string(BasisKind k)
{
    switch (k)
    {
    case BasisKind::klt: return "klt";
    case BasisKind::dct2: return "dct2";
    case BasisKind::dft: return "dft";
    case BasisKind::polynomial: return "poly";
    }
    return "?";
}

// Unitary transform basis. Column vectors are the transform's analysis
// directions; truncation keeps a subset of them.
struct Basis
{
    CMat q;
    BasisKind kind;
};

// Semi-unitary column subset Q_m. Support indices are 0-based, strictly
// increasing after validation.
struct TruncatedBasis
{
    CMat qm;
    std::vector<int> support;
    BasisKind kind;

    int order() const { return int(support.size()); }
};

// DCT-2: column l (0-based) has entries c_l * cos(pi*(2i+1)*l/(2M)),
// c_0 = sqrt(1/M), c_l = sqrt(2/M) otherwise. Real orthonormal.
inline Basis basis_dct2(int m)
{
    if (m < 2)
        throw std::invalid_argument("basis_dct2: M must be at least 2");
    CMat q(m, m);
    const double c0 = std::sqrt(1.0 / m);
    const double cl = std::sqrt(2.0 / m);
    for (int l = 0; l < m; ++l)
        for (int i = 0; i < m; ++i)
            q(i, l) = (l == 0 ? c0 : cl) * std::cos(pi * (2.0 * i + 1.0) * l / (2.0 * m));
    return {std::move(q), BasisKind::dct2};
}

// Unitary DFT with the e^{-j 2 pi i k / M} sign convention, matching the
// steering-vector phase law so aligned spectra concentrate at low indices.
inline Basis basis_dft(int m)
{
    if (m < 2)
        throw std::invalid_argument("basis_dft: M must be at least 2");
    CMat q(m, m);
    const double scale = 1.0 / std::sqrt(double(m));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            q(i, k) = scale * std::polar(1.0, -2.0 * pi * double(i) * double(k) / double(m));
    return {std::move(q), BasisKind::dft};
}

// Orthonormal polynomial basis: Householder QR of the Vandermonde matrix
// U_ij = (i)^(j) over antenna indices, columns in ascending degree, with the
// R diagonal forced positive so the result is unique. Householder keeps Q
// orthonormal to machine precision despite the Vandermonde conditioning.
inline Basis basis_polynomial(int m)
{
    if (m < 2)
        throw std::invalid_argument("basis_polynomial: M must be at least 2");
    // Powers of the index mapped to [-1, 1]; the raw index overflows at large M
    // and the spanned subspaces are invariant under affine index maps.
    RMat u(m, m);
    for (int i = 0; i < m; ++i)
    {
        const double x = 2.0 * double(i) / double(m - 1) - 1.0;
        double v = 1.0;
        for (int j = 0; j < m; ++j)
        {
            u(i, j) = v;
            v *= x;
        }
    }
    Eigen::HouseholderQR<RMat> qr(u);
    RMat qfull = qr.householderQ() * RMat::Identity(m, m);
    const RMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j)
        if (r(j, j) < 0.0)
            qfull.col(j) *= -1.0;
    const double ortho = (qfull.transpose() * qfull - RMat::Identity(m, m)).cwiseAbs().maxCoeff();
    if (!(ortho <= 1e-8))
        throw std::runtime_error("basis_polynomial: orthogonalization lost rank (max dev " +
                                 std::to_string(ortho) + ")");
    return {qfull.cast<cxd>(), BasisKind::polynomial};
}

// Karhunen-Loeve basis of a Hermitian matrix: eigenvectors ordered by
// descending eigenvalue (stable under ties), each column's phase fixed by
// making its first significant entry real positive.
inline Basis basis_klt(const CMat &hermitian)
{
    const int m = int(hermitian.rows());
    if (hermitian.cols() != m || m < 2)
        throw std::invalid_argument("basis_klt: input must be square, M >= 2");
    const double asym = (hermitian - hermitian.adjoint()).norm();
    if (asym > 1e-8 * std::max(1.0, hermitian.norm()))
        throw std::invalid_argument("basis_klt: input is not Hermitian");

    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (hermitian + hermitian.adjoint()));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("basis_klt: eigendecomposition failed");

    // Eigen returns ascending order; re-sort descending with index-stable ties.
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    const RVec &ev = es.eigenvalues();
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return ev(a) > ev(b); });

    CMat q(m, m);
    for (int c = 0; c < m; ++c)
    {
        CVec col = es.eigenvectors().col(idx[c]);
        for (int i = 0; i < m; ++i)
        {
            if (std::abs(col(i)) > 1e-12)
            {
                col *= std::conj(col(i)) / std::abs(col(i));
                break;
            }
        }
        q.col(c) = col;
    }
    return {std::move(q), BasisKind::klt};
}

// Convenience: eigenvalues of the KLT source in the basis ordering.
inline RVec klt_eigenvalues(const CMat &hermitian)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (hermitian + hermitian.adjoint()));
    RVec ev = es.eigenvalues();
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

// Transform coding gain: arithmetic over geometric mean of the transform-
// domain variances diag(Q^H C Q). Requires a normalized (trace M) source with
// strictly positive variances; estimated correlations can be indefinite and
// must be projected to the PSD cone first.
inline double coding_gain(const Basis &basis, const CMat &corr)
{
    const int m = int(basis.q.rows());
    double log_sum = 0.0;
    double mean = 0.0;
    for (int l = 0; l < m; ++l)
    {
        const double var = std::real(basis.q.col(l).dot(corr * basis.q.col(l)));
        if (!(var > 0.0))
            throw std::domain_error(
                "coding_gain: nonpositive transform variance; project the correlation "
                "to the PSD cone before calling");
        log_sum += std::log(var);
        mean += var;
    }
    mean /= double(m);
    return mean / std::exp(log_sum / double(m));
}

// Keep the listed columns (0-based, distinct, in increasing order).
inline TruncatedBasis truncate(const Basis &basis, std::vector<int> support)
{
    const int m = int(basis.q.cols());
    std::sort(support.begin(), support.end());
    if (!support.empty())
    {
        if (support.front() < 0 || support.back() >= m)
            throw std::invalid_argument("truncate: support index out of range");
        if (std::adjacent_find(support.begin(), support.end()) != support.end())
            throw std::invalid_argument("truncate: duplicate support index");
    }
    CMat qm(m, int(support.size()));
    for (size_t c = 0; c < support.size(); ++c)
        qm.col(int(c)) = basis.q.col(support[c]);
    return {std::move(qm), std::move(support), basis.kind};
}

} // namespace rrmimo
