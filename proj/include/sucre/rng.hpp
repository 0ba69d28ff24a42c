// SPDX-License-Identifier: Apache-2.0
//
// sucre-sim: Monte-Carlo and analytic toolkit for strongest-user collision resolution
// Copyright (C) 2026 The sucre-sim authors
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

#ifndef SUCRE_RNG_HPP
#define SUCRE_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace sucre
{

using Rng = std::mt19937_64;
using cdouble = std::complex<double>;

// Independent stream for (master seed, stream tag, index).
inline Rng make_substream(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
{
    std::seed_seq seq{std::uint32_t(master), std::uint32_t(master >> 32), std::uint32_t(stream),
                      std::uint32_t(stream >> 32), std::uint32_t(index), std::uint32_t(index >> 32)};
    return Rng(seq);
}

// CN(0, variance)
inline cdouble complex_normal(Rng &rng, double variance = 1.0)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline double uniform01(Rng &rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace sucre

#endif
