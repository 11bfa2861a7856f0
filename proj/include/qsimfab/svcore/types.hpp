// Copyright 2026 The qsimfab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace qsimfab {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Gate matrices are always held in double
/// precision and narrowed when applied to a single-precision slice.
struct Matrix {
    std::size_t dim = 0;
    std::vector<cplx> data;

    Matrix() = default;
    explicit Matrix(std::size_t d) : dim(d), data(d * d, cplx{0.0, 0.0}) {}
    Matrix(std::size_t d, std::vector<cplx> values) : dim(d), data(std::move(values)) {
        if (data.size() != dim * dim) {
            throw std::invalid_argument("matrix data size does not match dimension");
        }
    }

    static Matrix identity(std::size_t d) {
        Matrix m(d);
        for (std::size_t i = 0; i < d; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    cplx &operator()(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }

    Matrix adjoint() const {
        Matrix out(dim);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    friend Matrix operator*(const Matrix &a, const Matrix &b) {
        if (a.dim != b.dim) {
            throw std::invalid_argument("matrix dimension mismatch");
        }
        Matrix out(a.dim);
        for (std::size_t r = 0; r < a.dim; ++r) {
            for (std::size_t k = 0; k < a.dim; ++k) {
                const cplx v = a(r, k);
                if (v == cplx{0.0, 0.0}) {
                    continue;
                }
                for (std::size_t c = 0; c < a.dim; ++c) {
                    out(r, c) += v * b(k, c);
                }
            }
        }
        return out;
    }

    bool is_diagonal() const {
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                if (r != c && (*this)(r, c) != cplx{0.0, 0.0}) {
                    return false;
                }
            }
        }
        return true;
    }

    /// Largest entry-wise deviation of U^dagger U from the identity.
    double unitarity_error() const {
        const Matrix p = adjoint() * (*this);
        double worst = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                const cplx expect = r == c ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
                worst = std::max(worst, std::abs(p(r, c) - expect));
            }
        }
        return worst;
    }
};

enum class PrecisionMode { Single, Double };

constexpr std::size_t bytes_per_amplitude(PrecisionMode p) {
    return p == PrecisionMode::Single ? 8 : 16;
}

inline std::string_view to_string(PrecisionMode p) {
    return p == PrecisionMode::Single ? "single" : "double";
}

inline PrecisionMode parse_precision(std::string_view s) {
    if (s == "single" || s == "fp32") {
        return PrecisionMode::Single;
    }
    if (s == "double" || s == "fp64") {
        return PrecisionMode::Double;
    }
    throw std::invalid_argument("unknown precision '" + std::string(s) + "'");
}

template <typename Real>
constexpr PrecisionMode precision_of() {
    static_assert(std::is_same_v<Real, float> || std::is_same_v<Real, double>);
    return std::is_same_v<Real, float> ? PrecisionMode::Single : PrecisionMode::Double;
}

/// A contiguous block of amplitudes. Holds either a full state or one rank's
/// shard of a distributed state; the length is always a power of two.
template <typename Real>
class BasicStateSlice {
   public:
    using value_type = std::complex<Real>;

    BasicStateSlice() : amps_(1, value_type{1, 0}) {}

    /// Zero-initialized slice of 2^num_bits amplitudes.
    explicit BasicStateSlice(unsigned num_bits) : amps_(std::size_t{1} << num_bits) {}

    explicit BasicStateSlice(std::vector<value_type> amps) : amps_(std::move(amps)) {
        if (amps_.empty() || !std::has_single_bit(amps_.size())) {
            throw std::invalid_argument("state slice length must be a power of two");
        }
    }

    static BasicStateSlice basis(unsigned num_bits, std::uint64_t index) {
        BasicStateSlice s(num_bits);
        if (index >= s.size()) {
            throw std::out_of_range("basis index out of range");
        }
        s.amps_[index] = value_type{1, 0};
        return s;
    }

    std::size_t size() const { return amps_.size(); }
    unsigned num_bits() const { return static_cast<unsigned>(std::countr_zero(amps_.size())); }
    static constexpr PrecisionMode precision() { return precision_of<Real>(); }

    value_type &operator[](std::size_t i) { return amps_[i]; }
    const value_type &operator[](std::size_t i) const { return amps_[i]; }

    std::vector<value_type> &amps() { return amps_; }
    const std::vector<value_type> &amps() const { return amps_; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += static_cast<double>(std::norm(a));
        }
        return s;
    }

    friend bool operator==(const BasicStateSlice &, const BasicStateSlice &) = default;

   private:
    std::vector<value_type> amps_;
};

using StateSlice = BasicStateSlice<double>;
using StateSliceF = BasicStateSlice<float>;

/// Largest absolute amplitude difference. Sizes must match.
template <typename Real>
double max_abs_diff(const BasicStateSlice<Real> &a, const BasicStateSlice<Real> &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("state sizes differ");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, static_cast<double>(std::abs(a[i] - b[i])));
    }
    return worst;
}

/// Difference after removing the global phase: b is rotated so its
/// largest-magnitude amplitude has the same phase as a's entry there.
template <typename Real>
double max_abs_diff_up_to_phase(const BasicStateSlice<Real> &a, const BasicStateSlice<Real> &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("state sizes differ");
    }
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (std::abs(a[i]) > std::abs(a[pivot])) {
            pivot = i;
        }
    }
    std::complex<double> phase{1.0, 0.0};
    if (std::abs(b[pivot]) > 0 && std::abs(a[pivot]) > 0) {
        const std::complex<double> ap(a[pivot]);
        const std::complex<double> bp(b[pivot]);
        phase = (ap / std::abs(ap)) / (bp / std::abs(bp));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::complex<double> d = std::complex<double>(a[i]) - phase * std::complex<double>(b[i]);
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

}  // namespace qsimfab
