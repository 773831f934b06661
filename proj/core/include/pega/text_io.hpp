// Copyright 2026 The PEGA Authors.
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

// Line-oriented text helpers shared by every file format in the project.

#ifndef PEGA_TEXT_IO_HPP_
#define PEGA_TEXT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace pega {

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

/// Reverses escape_field: `\t`, `\n`, `\r`, `\\`.
std::string unescape_field(std::string_view s);
std::string escape_field(std::string_view s);

/// Shortest text that round-trips the double exactly.
std::string format_double(double value);

double parse_double(std::string_view s, const std::string& source,
                    std::size_t line);
std::int64_t parse_int(std::string_view s, const std::string& source,
                       std::size_t line);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

/// Calls `fn(line, line_number)` for every non-empty line not starting with
/// '#'. Line numbers are 1-based.
void for_each_record(
    const std::filesystem::path& path,
    const std::function<void(std::string_view, std::size_t)>& fn);

/// 64-bit FNV-1a; used for checkpoint integrity and input digests.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string file_digest(const std::filesystem::path& path);

}  // namespace pega

#endif  // PEGA_TEXT_IO_HPP_
