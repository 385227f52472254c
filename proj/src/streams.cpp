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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "tbs/types.hpp"

namespace tbs {

Batch make_batch(std::int64_t index, std::size_t size) {
  if (size > 0xffffffffULL) throw CapacityError("batch too large");
  Batch b;
  b.index = index;
  b.items.reserve(size);
  for (std::size_t i = 0; i < size; ++i) b.items.push_back(make_item_id(index, i));
  return b;
}

std::vector<Batch> batches_from_sizes(const std::vector<std::size_t>& sizes) {
  std::vector<Batch> out;
  out.reserve(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    out.push_back(make_batch(static_cast<std::int64_t>(k) + 1, sizes[k]));
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto colon = text.find(':', pos);
    out.push_back(text.substr(pos, colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view text, std::string_view spec) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("bad field '" + std::string(text) + "' in stream spec '" +
                      std::string(spec) + "'");
  }
  return value;
}

std::int64_t parse_count(std::string_view text, std::string_view spec) {
  const auto v = parse_field<std::int64_t>(text, spec);
  if (v < 0) throw ConfigError("negative batch size in '" + std::string(spec) + "'");
  return v;
}

}  // namespace

StreamSpec StreamSpec::parse(std::string_view text) {
  const auto f = split(text);
  StreamSpec s;
  const auto arity = [&](std::size_t lo, std::size_t hi) {
    if (f.size() < lo || f.size() > hi) {
      throw ConfigError("wrong number of fields in stream spec '" +
                        std::string(text) + "'");
    }
  };
  if (f[0] == "constant") {
    arity(2, 2);
    s.kind = Kind::kConstant;
    s.b = parse_count(f[1], text);
  } else if (f[0] == "uniform") {
    arity(3, 3);
    s.kind = Kind::kUniform;
    s.b = parse_count(f[1], text);
    s.b2 = parse_count(f[2], text);
    if (s.b2 < s.b) throw ConfigError("uniform stream needs lo <= hi");
  } else if (f[0] == "growing" || f[0] == "decaying") {
    arity(4, 4);
    s.kind = f[0] == "growing" ? Kind::kGrowing : Kind::kDecaying;
    s.b = parse_count(f[1], text);
    s.phi = parse_field<double>(f[2], text);
    s.start = parse_field<std::int64_t>(f[3], text);
    if (!(s.phi > 0.0) || !std::isfinite(s.phi)) {
      throw ConfigError("stream growth factor must be positive");
    }
  } else if (f[0] == "periodic") {
    arity(4, 5);
    s.kind = Kind::kPeriodic;
    s.b = parse_count(f[1], text);
    s.b2 = parse_count(f[2], text);
    s.period = parse_field<std::int64_t>(f[3], text);
    if (s.period < 1) throw ConfigError("stream period must be >= 1");
    if (f.size() == 5) {
      s.fraction = parse_field<double>(f[4], text);
      if (!(s.fraction >= 0.0 && s.fraction <= 1.0)) {
        throw ConfigError("periodic split fraction must lie in [0, 1]");
      }
    }
  } else {
    throw ConfigError("unknown stream generator '" + std::string(f[0]) + "'");
  }
  return s;
}

std::string StreamSpec::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kConstant:
      os << "constant:" << b;
      break;
    case Kind::kUniform:
      os << "uniform:" << b << ':' << b2;
      break;
    case Kind::kGrowing:
    case Kind::kDecaying:
      os << (kind == Kind::kGrowing ? "growing:" : "decaying:") << b << ':'
         << phi << ':' << start;
      break;
    case Kind::kPeriodic:
      os << "periodic:" << b << ':' << b2 << ':' << period << ':' << fraction;
      break;
  }
  return os.str();
}

std::size_t StreamSpec::size_at(std::int64_t k) const {
  switch (kind) {
    case Kind::kConstant:
      return static_cast<std::size_t>(b);
    case Kind::kUniform:
      throw ConfigError("uniform stream sizes are random");
    case Kind::kGrowing:
    case Kind::kDecaying: {
      if (k < start) return static_cast<std::size_t>(b);
      const double v = static_cast<double>(b) *
                       std::pow(phi, static_cast<double>(k - start));
      if (v > 4e9) throw CapacityError("batch size overflow in growing stream");
      return static_cast<std::size_t>(std::llround(v));
    }
    case Kind::kPeriodic: {
      const auto first = static_cast<std::int64_t>(
          std::ceil(fraction * static_cast<double>(period) - 1e-9));
      const std::int64_t phase = (k - 1) % period;
      return static_cast<std::size_t>(phase < first ? b : b2);
    }
  }
  return 0;
}

std::vector<std::size_t> StreamSpec::sizes(std::int64_t horizon,
                                           RandomStream& rng) const {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
  for (std::int64_t k = 1; k <= horizon; ++k) {
    if (kind == Kind::kUniform) {
      out.push_back(static_cast<std::size_t>(b) +
                    rng.index(static_cast<std::size_t>(b2 - b + 1)));
    } else {
      out.push_back(size_at(k));
    }
  }
  return out;
}

}  // namespace tbs
