// Copyright 2026 The fairrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fairrank {

// 64-bit FNV-1a, used for content-addressing artifacts and config hashes.
class ContentHasher {
 public:
  ContentHasher& Update(std::span<const std::byte> bytes);
  ContentHasher& Update(std::string_view text);
  ContentHasher& Update(std::uint64_t value);
  ContentHasher& Update(double value);

  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string HashHex(std::string_view text);

}  // namespace fairrank
