// Copyright 2026 The TBS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "tbs/streams.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "tbs/analysis.hpp"
#include "tbs/types.hpp"

namespace tbs {
namespace {

TEST(StreamSpecTest, ParseAndRoundTrip) {
  for (const char* text : {"constant:100", "uniform:0:200", "growing:100:1.002:200",
                           "decaying:100:0.8:200", "periodic:100:300:2000"}) {
    const StreamSpec s = StreamSpec::parse(text);
    EXPECT_EQ(StreamSpec::parse(s.to_string()).to_string(), s.to_string()) << text;
  }
  for (const char* bad : {"", "constant", "constant:-1", "uniform:5:2", "fixed:3",
                          "periodic:1:2:0", "periodic:1:2:3:1.5", "growing:1:0:1",
                          "constant:x"}) {
    EXPECT_THROW(StreamSpec::parse(bad), ConfigError) << bad;
  }
}

TEST(StreamSpecTest, DeterministicGenerators) {
  RandomStream rng = size_stream(1);
  EXPECT_EQ(StreamSpec::parse("constant:7").sizes(3, rng),
            (std::vector<std::size_t>{7, 7, 7}));
  const StreamSpec g = StreamSpec::parse("growing:100:1.5:3");
  EXPECT_EQ(g.size_at(1), 100u);
  EXPECT_EQ(g.size_at(3), 100u);
  EXPECT_EQ(g.size_at(4), 150u);
  EXPECT_EQ(g.size_at(5), 225u);
  const StreamSpec d = StreamSpec::parse("decaying:100:0.8:200");
  EXPECT_EQ(d.size_at(199), 100u);
  EXPECT_EQ(d.size_at(202), static_cast<std::size_t>(std::llround(64.0)));
  // Period of 3 with f = 2/3: two steps of b1, then one of b2.
  const StreamSpec p = StreamSpec::parse("periodic:1:9:3");
  EXPECT_EQ(p.sizes(7, rng), (std::vector<std::size_t>{1, 1, 9, 1, 1, 9, 1}));
  const StreamSpec big = StreamSpec::parse("periodic:100:300:2000");
  EXPECT_EQ(big.size_at(1334), 100u);
  EXPECT_EQ(big.size_at(1335), 300u);
  EXPECT_EQ(big.size_at(2001), 100u);
}

TEST(StreamSpecTest, UniformSizes) {
  const StreamSpec u = StreamSpec::parse("uniform:2:5");
  RandomStream a = size_stream(1), b = size_stream(1);
  const auto s = u.sizes(40000, a);
  EXPECT_EQ(s, u.sizes(40000, b));
  std::vector<std::size_t> counts(4, 0);
  for (auto x : s) {
    ASSERT_GE(x, 2u);
    ASSERT_LE(x, 5u);
    ++counts[x - 2];
  }
  EXPECT_TRUE(chi_square_uniformity(counts).pass);
  EXPECT_THROW(u.size_at(1), ConfigError);
}

TEST(BatchTest, ItemIdsEncodeArrival) {
  const auto batches = batches_from_sizes({2, 0, 3});
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].index, 1);
  EXPECT_TRUE(batches[1].items.empty());
  EXPECT_EQ(batches[2].items[2], make_item_id(3, 2));
  EXPECT_EQ(arrival_index(batches[2].items[2]), 3);
  EXPECT_EQ(arrival_offset(batches[2].items[2]), 2u);
}

}  // namespace
}  // namespace tbs
