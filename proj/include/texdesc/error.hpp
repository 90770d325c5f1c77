// Copyright 2026 The texdesc Authors
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

#ifndef TEXDESC__ERROR_HPP_
#define TEXDESC__ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace texdesc
{

/// Base class of every error raised by the library. `kind()` is a stable
/// machine-readable token used by the CLI on stderr.
class Error : public std::runtime_error
{
public:
  Error(std::string kind, const std::string & what)
  : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string & kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define TEXDESC_DEFINE_ERROR(Name, token)                                  \
  class Name : public Error                                               \
  {                                                                       \
  public:                                                                 \
    explicit Name(const std::string & what) : Error(token, what) {}       \
  };

TEXDESC_DEFINE_ERROR(IoError, "io")
TEXDESC_DEFINE_ERROR(ParseError, "parse")
TEXDESC_DEFINE_ERROR(DecodeError, "decode")
TEXDESC_DEFINE_ERROR(ConfigError, "config")
TEXDESC_DEFINE_ERROR(DomainError, "domain")
TEXDESC_DEFINE_ERROR(StatisticsError, "statistics")
TEXDESC_DEFINE_ERROR(SelectionError, "selection")
TEXDESC_DEFINE_ERROR(TrainingError, "training")
TEXDESC_DEFINE_ERROR(VersionError, "version")

#undef TEXDESC_DEFINE_ERROR

/// Corrupt or truncated container; `offset()` is the byte position where
/// decoding failed.
class FormatError : public Error
{
public:
  FormatError(const std::string & what, std::uint64_t offset)
  : Error("format", what + " (at byte offset " + std::to_string(offset) + ")"),
    offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

}  // namespace texdesc

#endif  // TEXDESC__ERROR_HPP_
