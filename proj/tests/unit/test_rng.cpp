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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "qrclab/rng.hpp"

using namespace qrc;

TEST_CASE("identical seed and stream reproduce the sequence") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams and children differ") {
  RngStream a(42, 0), b(42, 1);
  CHECK(a.next_u64() != b.next_u64());
  const RngStream root(5);
  RngStream c0 = root.child(0), c1 = root.child(1), c01 = root.child(0, 1), c10 = root.child(1, 0);
  std::set<std::uint64_t> firsts{c0.next_u64(), c1.next_u64(), c01.next_u64(), c10.next_u64()};
  CHECK(firsts.size() == 4);
}

TEST_CASE("child does not advance the parent") {
  RngStream a(3), b(3);
  (void)a.child(9);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform and normal moments") {
  RngStream r(11);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  double lo = 1, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_index stays in range and hits every value") {
  RngStream r(1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto k = r.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(c > 800);
}
