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
#include <stdexcept>
#include <string>
#include <string_view>

namespace fairrank {

using UserId = std::int32_t;
using ItemId = std::int32_t;
using ProviderId = std::int32_t;
using AttributeClass = std::int32_t;

// Where an interaction came from. Upsampled rows never enter evaluation
// ground truth.
enum class Provenance : std::uint8_t {
  kBase = 0,
  kReal = 1,
  kFake = 2,
  kFakeByPop = 3,
};

std::string_view ProvenanceName(Provenance p);
Provenance ParseProvenance(std::string_view name);

// Base error for every failure the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::int64_t line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

}  // namespace fairrank
