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

#include "lpg/wire.hpp"

#include <string>

#include "lpg/errors.hpp"

namespace lpg {
namespace {

constexpr std::uint8_t kCodeZero = 0b00;
constexpr std::uint8_t kCodePlus = 0b01;
constexpr std::uint8_t kCodeMinus = 0b10;

}  // namespace

void pack_row(std::span<const std::int8_t> row, std::span<std::uint8_t> out) {
  if (out.size() < packed_row_bytes(static_cast<int>(row.size()))) {
    throw ShapeError("packed output buffer too small");
  }
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t i = 0; i < row.size(); ++i) {
    std::uint8_t code;
    switch (row[i]) {
      case 0: code = kCodeZero; break;
      case 1: code = kCodePlus; break;
      case -1: code = kCodeMinus; break;
      default:
        throw DomainError("encoded entries must lie in {-1, 0, +1}, got " +
                          std::to_string(static_cast<int>(row[i])));
    }
    out[i / 4] |= static_cast<std::uint8_t>(code << (2 * (i % 4)));
  }
}

void unpack_row(std::span<const std::uint8_t> bytes, int d, std::span<std::int8_t> row) {
  if (row.size() < static_cast<std::size_t>(d)) {
    throw ShapeError("unpacked output buffer too small");
  }
  if (bytes.size() < packed_row_bytes(d)) {
    throw ParseError("packed row truncated: have " + std::to_string(bytes.size()) +
                     " bytes, need " + std::to_string(packed_row_bytes(d)));
  }
  for (int i = 0; i < d; ++i) {
    const std::uint8_t code = (bytes[i / 4] >> (2 * (i % 4))) & 0b11;
    switch (code) {
      case kCodeZero: row[i] = 0; break;
      case kCodePlus: row[i] = 1; break;
      case kCodeMinus: row[i] = -1; break;
      default:
        throw ParseError("reserved 2-bit code 11 at dimension " + std::to_string(i));
    }
  }
}

std::vector<std::uint8_t> pack_labels(const std::vector<std::int32_t>& labels,
                                      int num_classes) {
  if (num_classes > 255) {
    throw ArgumentError("label wire form supports at most 255 classes");
  }
  std::vector<std::uint8_t> out(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == kUnlabeled) {
      out[v] = 0xFF;
    } else if (labels[v] >= 0 && labels[v] < num_classes) {
      out[v] = static_cast<std::uint8_t>(labels[v]);
    } else {
      throw DomainError("label out of range at node " + std::to_string(v));
    }
  }
  return out;
}

std::vector<std::int32_t> unpack_labels(std::span<const std::uint8_t> bytes,
                                        int num_classes) {
  std::vector<std::int32_t> out(bytes.size());
  for (std::size_t v = 0; v < bytes.size(); ++v) {
    if (bytes[v] == 0xFF) {
      out[v] = kUnlabeled;
    } else if (bytes[v] < num_classes) {
      out[v] = bytes[v];
    } else {
      throw ParseError("label byte " + std::to_string(bytes[v]) +
                       " out of range for " + std::to_string(num_classes) +
                       " classes at node " + std::to_string(v));
    }
  }
  return out;
}

}  // namespace lpg
