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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prda::io {

/// Process-wide record of every file the library opened for reading. All
/// library reads go through read_file/read_bytes, so the log is complete.
class AccessLog {
 public:
  static AccessLog& global();

  void record(const std::filesystem::path& path);
  std::vector<std::string> entries() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> entries_;
};

std::string read_file(const std::filesystem::path& path);
std::vector<std::byte> read_bytes(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view contents);
void write_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);

/// FNV-1a 64 of the file's contents (a logged read).
std::uint64_t file_digest(const std::filesystem::path& path);

std::string hex64(std::uint64_t value);

}  // namespace prda::io
