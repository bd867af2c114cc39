// Copyright 2026 The treeleak Authors
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

#include <set>

#include <gtest/gtest.h>

#include "treeleak/common.h"

namespace treeleak {
namespace {

TEST(Matrix, SelectAndConcat) {
  Matrix m(3, 2);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) m(r, c) = static_cast<double>(10 * r + c);
  }
  const std::vector<int> rows{2, 0};
  const Matrix s = m.select_rows(rows);
  ASSERT_EQ(s.rows(), 2u);
  EXPECT_EQ(s(0, 1), 21.0);
  EXPECT_EQ(s(1, 0), 0.0);

  const std::vector<int> cols{1};
  const Matrix c = m.select_cols(cols);
  ASSERT_EQ(c.cols(), 1u);
  EXPECT_EQ(c(2, 0), 21.0);

  const Matrix h = m.hconcat(c);
  ASSERT_EQ(h.cols(), 3u);
  EXPECT_EQ(h(1, 2), 11.0);
  EXPECT_EQ(m.column(0), (std::vector<double>{0, 10, 20}));
}

TEST(Matrix, ConcatRejectsRowMismatch) {
  EXPECT_THROW(Matrix(2, 1).hconcat(Matrix(3, 1)), InvalidArgumentError);
}

TEST(DeriveSeed, DeterministicAndSeparatedByTagAndIndex) {
  EXPECT_EQ(derive_seed(7, "split"), derive_seed(7, "split"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s) {
    seen.insert(derive_seed(s, "split"));
    seen.insert(derive_seed(s, "tree"));
    for (std::uint64_t i = 0; i < 5; ++i) seen.insert(derive_seed(s, "features", i));
  }
  EXPECT_EQ(seen.size(), 20u * 7u);
}

}  // namespace
}  // namespace treeleak
