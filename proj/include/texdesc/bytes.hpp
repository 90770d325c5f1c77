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

#ifndef TEXDESC__BYTES_HPP_
#define TEXDESC__BYTES_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "texdesc/error.hpp"

namespace texdesc::bytes
{

static_assert(std::endian::native == std::endian::little, "little-endian host expected");

template <typename T>
void put(std::string & out, T value)
{
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

/// Sequential little-endian reader reporting the failing offset.
class Reader
{
public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <typename T>
  T get(const char * what)
  {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string_view take(std::size_t n, const char * what)
  {
    need(n, what);
    auto view = data_.substr(pos_, n);
    pos_ += n;
    return view;
  }

  std::size_t offset() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == data_.size(); }

private:
  void need(std::size_t n, const char * what) const
  {
    if (data_.size() - pos_ < n) {
      throw FormatError(std::string("truncated input while reading ") + what, pos_);
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace texdesc::bytes

#endif  // TEXDESC__BYTES_HPP_
