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

#include <bit>
#include <cstring>
#include <fmt/format.h>
#include <fstream>

#include "fairrank/trainer.h"

namespace fairrank::trainer {
namespace {

constexpr char kMagic[8] = {'F', 'R', 'C', 'K', 'P', 'T', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void PutLe(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto bits = static_cast<U>(value);
  char raw[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    raw[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  }
  out.write(raw, sizeof(T));
}

template <typename T>
T GetLe(std::istream& in) {
  using U = std::make_unsigned_t<T>;
  unsigned char raw[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(raw), sizeof(T))) {
    throw ParseError("truncated checkpoint", 0);
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(raw[i]) << (8 * i);
  return static_cast<T>(bits);
}

void PutDoubles(std::ostream& out, const std::vector<double>& values) {
  for (double v : values) PutLe(out, std::bit_cast<std::uint64_t>(v));
}

void GetDoubles(std::istream& in, std::vector<double>& values) {
  for (double& v : values) v = std::bit_cast<double>(GetLe<std::uint64_t>(in));
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write checkpoint {}", path.string()));
  const FactorModel& m = ckpt.model;
  out.write(kMagic, sizeof(kMagic));
  PutLe(out, kVersion);
  PutLe(out, m.num_users);
  PutLe(out, m.num_items);
  PutLe(out, m.dim);
  PutLe(out, ckpt.seed);
  PutLe(out, static_cast<std::uint32_t>(ckpt.config_hash.size()));
  out.write(ckpt.config_hash.data(), static_cast<std::streamsize>(ckpt.config_hash.size()));
  PutDoubles(out, m.user_factors);
  PutDoubles(out, m.item_factors);
  if (!out) throw Error(fmt::format("failed writing checkpoint {}", path.string()));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open checkpoint {}", path.string()));
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError(fmt::format("{} is not a checkpoint", path.string()), 0);
  }
  const auto version = GetLe<std::uint32_t>(in);
  if (version != kVersion) {
    throw ParseError(fmt::format("unsupported checkpoint version {}", version), 0);
  }
  const auto users = GetLe<std::int32_t>(in);
  const auto items = GetLe<std::int32_t>(in);
  const auto dim = GetLe<std::int32_t>(in);
  if (users < 0 || items < 0 || dim < 0) throw ParseError("corrupt checkpoint header", 0);
  Checkpoint ckpt;
  ckpt.seed = GetLe<std::uint64_t>(in);
  const auto hash_len = GetLe<std::uint32_t>(in);
  ckpt.config_hash.resize(hash_len);
  if (!in.read(ckpt.config_hash.data(), hash_len)) throw ParseError("truncated checkpoint", 0);
  ckpt.model = FactorModel(users, items, dim);
  GetDoubles(in, ckpt.model.user_factors);
  GetDoubles(in, ckpt.model.item_factors);
  return ckpt;
}

}  // namespace fairrank::trainer
