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

#ifndef TBS_TYPES_HPP_
#define TBS_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbs {

// Item identifiers are (batch index << 32) | offset within the batch.
using ItemId = std::uint64_t;

inline ItemId make_item_id(std::int64_t batch_index, std::uint64_t offset) {
  return (static_cast<std::uint64_t>(batch_index) << 32) | offset;
}
inline std::int64_t arrival_index(ItemId id) {
  return static_cast<std::int64_t>(id >> 32);
}
inline std::uint64_t arrival_offset(ItemId id) { return id & 0xffffffffULL; }

struct Batch {
  std::int64_t index = 0;
  std::vector<ItemId> items;

  std::size_t size() const { return items.size(); }
};

Batch make_batch(std::int64_t index, std::size_t size);
std::vector<Batch> batches_from_sizes(const std::vector<std::size_t>& sizes);

// Error taxonomy. All derive from std::runtime_error or std::logic_error so
// callers can catch coarsely.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnsupportedDecay : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};
// A per-step invariant of a sampler state machine failed.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};
// A statistical check was requested with too little power to be meaningful.
struct TestDesignError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace tbs

#endif  // TBS_TYPES_HPP_
