// Copyright 2026 The lpgraph Authors
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

#ifndef LPG_WIRE_HPP_
#define LPG_WIRE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lpg/types.hpp"

namespace lpg {

// Encoded-feature wire form: 2 bits per dimension, little-endian within a
// byte (dimension i of a byte occupies bits 2i and 2i+1), rows padded to a
// byte boundary.
//
//   00 -> 0,  01 -> +1,  10 -> -1,  11 -> reserved (decoder rejects)

inline std::size_t packed_row_bytes(int d) {
  return (static_cast<std::size_t>(d) + 3) / 4;
}

// out must hold packed_row_bytes(row.size()) bytes.
void pack_row(std::span<const std::int8_t> row, std::span<std::uint8_t> out);

// row must hold d entries; throws ParseError on a reserved code.
void unpack_row(std::span<const std::uint8_t> bytes, int d, std::span<std::int8_t> row);

// Perturbed-label wire form: one byte per node, class index in [0, c),
// 0xFF marks an unlabeled node.
std::vector<std::uint8_t> pack_labels(const std::vector<std::int32_t>& labels,
                                      int num_classes);
std::vector<std::int32_t> unpack_labels(std::span<const std::uint8_t> bytes,
                                        int num_classes);

}  // namespace lpg

#endif  // LPG_WIRE_HPP_
