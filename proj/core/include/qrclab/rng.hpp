// Copyright 2026 The qrclab Authors
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

#include <cstdint>
#include <random>

namespace qrc {

/// Reproducible random stream keyed by (seed, stream_id).
///
/// Each ensemble member derives its own stream with `child()`, so draws are
/// independent of the order in which realizations are scheduled. Uniform and
/// normal variates are produced from raw engine bits rather than the
/// implementation-defined std distributions, which keeps sequences identical
/// across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent stream for a sub-task (realization, purpose, ...).
  RngStream child(std::uint64_t key) const;
  RngStream child(std::uint64_t key_a, std::uint64_t key_b) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Standard normal.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// SplitMix64 finalizer; used to hash stream keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace qrc
