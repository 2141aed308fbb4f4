/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The prda authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Layout (all integers little-endian):
//   "PRDA" | u32 version | u32 kind | u32 network_count
//   per network: u32 size_count | u32 sizes[size_count]
//   payload: f64 per parameter, networks in order, per layer weights (row-major) then biases
//   u64 FNV-1a checksum of the payload bytes

#include <array>
#include <bit>
#include <cstring>
#include <string>

#include "prda/error.hpp"
#include "prda/io.hpp"
#include "prda/network.hpp"

namespace prda {
namespace {

constexpr std::array<char, 4> kMagic = {'P', 'R', 'D', 'A'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::span<const char> bytes) {
    for (char c : bytes) out_.push_back(static_cast<std::byte>(c));
  }
  std::size_t size() const { return out_.size(); }
  std::vector<std::byte>& bytes() { return out_; }

 private:
  std::vector<std::byte> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> in) : in_(in) {}

  std::uint64_t uint(int width) {
    require(pos_ + static_cast<std::size_t>(width) <= in_.size(), ErrorCode::kParse,
            "model file truncated at byte " + std::to_string(pos_));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::byte> encode_model(const ModelFile& file) {
  Writer w;
  w.raw(kMagic);
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(file.kind));
  w.u32(static_cast<std::uint32_t>(file.networks.size()));
  for (const auto& net : file.networks) {
    w.u32(static_cast<std::uint32_t>(net.sizes().size()));
    for (std::size_t s : net.sizes()) w.u32(static_cast<std::uint32_t>(s));
  }
  const std::size_t payload_begin = w.size();
  for (const auto& net : file.networks) {
    for (const auto& layer : net.layers()) {
      for (double v : layer.weight) w.f64(v);
      for (double v : layer.bias) w.f64(v);
    }
  }
  const auto payload = std::span(w.bytes()).subspan(payload_begin);
  w.u64(fnv1a64(payload));
  return std::move(w.bytes());
}

ModelFile decode_model(std::span<const std::byte> bytes) {
  require(bytes.size() >= 16 && std::memcmp(bytes.data(), kMagic.data(), 4) == 0, ErrorCode::kParse,
          "not a model file (bad magic)");
  Reader r(bytes.subspan(4));
  const std::uint32_t version = r.u32();
  require(version == kModelFormatVersion, ErrorCode::kParse,
          "unsupported model format version " + std::to_string(version));
  const std::uint32_t kind = r.u32();
  require(kind == 1 || kind == 2, ErrorCode::kParse, "unknown model kind " + std::to_string(kind));
  const std::uint32_t count = r.u32();
  require(count >= 1 && count <= 16, ErrorCode::kParse, "implausible network count");

  ModelFile file;
  file.kind = static_cast<ModelKind>(kind);
  std::vector<std::vector<std::size_t>> shapes(count);
  for (auto& shape : shapes) {
    const std::uint32_t n = r.u32();
    require(n >= 2 && n <= 64, ErrorCode::kParse, "implausible layer count");
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t s = r.u32();
      require(s >= 1 && s <= (1u << 20), ErrorCode::kParse, "implausible layer size");
      shape.push_back(s);
    }
  }
  const std::size_t payload_begin = 4 + r.pos();
  for (auto& shape : shapes) {
    Network net(shape);
    for (auto& layer : net.layers()) {
      for (double& v : layer.weight) v = r.f64();
      for (double& v : layer.bias) v = r.f64();
    }
    file.networks.push_back(std::move(net));
  }
  const std::size_t payload_end = 4 + r.pos();
  const std::uint64_t stored = r.u64();
  require(r.remaining() == 0, ErrorCode::kParse, "trailing bytes after model checksum");
  const std::uint64_t actual = fnv1a64(bytes.subspan(payload_begin, payload_end - payload_begin));
  require(stored == actual, ErrorCode::kParse, "model checksum mismatch");
  for (const auto& net : file.networks) {
    require(all_finite(net.flat_parameters()), ErrorCode::kParse, "model contains non-finite parameters");
  }
  return file;
}

void save_model(const std::filesystem::path& path, const SourceModel& model) {
  ModelFile file{ModelKind::kSource, {model.extractor(), model.classifier()}};
  io::write_bytes(path, encode_model(file));
}

void save_model(const std::filesystem::path& path, const TargetModel& model) {
  ModelFile file{ModelKind::kTarget, {model.extractor, model.head_s2t, model.head_t}};
  io::write_bytes(path, encode_model(file));
}

ModelFile load_model_file(const std::filesystem::path& path) { return decode_model(io::read_bytes(path)); }

SourceModel load_source_model(const std::filesystem::path& path) {
  ModelFile file = load_model_file(path);
  require(file.kind == ModelKind::kSource && file.networks.size() == 2, ErrorCode::kConfig,
          "'" + path.string() + "' is not a source model");
  return SourceModel(file.networks[0].clone_parameters(), file.networks[1].clone_parameters());
}

TargetModel load_target_model(const std::filesystem::path& path) {
  ModelFile file = load_model_file(path);
  require(file.kind == ModelKind::kTarget && file.networks.size() == 3, ErrorCode::kConfig,
          "'" + path.string() + "' is not a target model");
  return TargetModel{std::move(file.networks[0]), std::move(file.networks[1]), std::move(file.networks[2])};
}

}  // namespace prda
