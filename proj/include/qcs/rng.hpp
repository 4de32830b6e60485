// SPDX-License-Identifier: Apache-2.0
//
// qcslab: quantized compressed sensing laboratory
// Copyright (C) 2026 qcslab developers
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

#include <cstddef>
#include <cstdint>

namespace qcs {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t z);

/// Derives an independent seed for a named purpose (train split, minibatch
/// stream, ...) from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

/// Counter-based generator: draw k of stream s under seed is a pure function
/// of (seed, s, k). Sample k of a dataset owns stream k, so results do not
/// depend on the order in which samples are generated.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Standard normal via the Box-Muller transform; values come in pairs.
    double normal();

    /// Uniform integer in [0, bound); bound must be positive.
    std::size_t below(std::size_t bound);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace qcs
