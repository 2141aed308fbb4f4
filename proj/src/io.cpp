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

#include "prda/io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "prda/core_math.hpp"
#include "prda/error.hpp"

namespace prda::io {

AccessLog& AccessLog::global() {
  static AccessLog log;
  return log;
}

void AccessLog::record(const std::filesystem::path& path) {
  std::error_code ec;
  auto canonical = std::filesystem::weakly_canonical(path, ec);
  std::lock_guard lock(mutex_);
  entries_.push_back(ec ? path.string() : canonical.string());
}

std::vector<std::string> AccessLog::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

void AccessLog::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

std::vector<std::byte> read_bytes(const std::filesystem::path& path) {
  AccessLog::global().record(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<std::byte>(raw[i]);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  AccessLog::global().record(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  // Write to a sibling temp file then rename so readers never see a torn file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot rename to '" + path.string() + "': " + ec.message());
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  write_bytes(path, std::as_bytes(std::span(contents.data(), contents.size())));
}

std::uint64_t file_digest(const std::filesystem::path& path) { return fnv1a64(read_bytes(path)); }

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace prda::io
