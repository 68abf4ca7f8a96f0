// Copyright 2026 The csrover Authors. All Rights Reserved.
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

#ifndef CSROVER_ERROR_H_
#define CSROVER_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csrover {

// Bad input or configuration. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what)
      : std::runtime_error(what) {}
};

// File system failures. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A library invariant was broken. Maps to CLI exit code 3.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

// Raised by the tokenizer for code points outside Latin, CJK, whitespace
// and punctuation.
class UnsupportedScriptError : public ValidationError {
 public:
  UnsupportedScriptError(std::size_t code_point_index, std::size_t byte_offset,
                         char32_t code_point);

  std::size_t code_point_index() const { return code_point_index_; }
  std::size_t byte_offset() const { return byte_offset_; }
  char32_t code_point() const { return code_point_; }

 private:
  std::size_t code_point_index_;
  std::size_t byte_offset_;
  char32_t code_point_;
};

class MissingHypothesisError : public ValidationError {
 public:
  explicit MissingHypothesisError(const std::string& utt_id)
      : ValidationError("missing hypothesis for utterance '" + utt_id + "'"),
        utt_id_(utt_id) {}

  const std::string& utt_id() const { return utt_id_; }

 private:
  std::string utt_id_;
};

}  // namespace csrover

#endif  // CSROVER_ERROR_H_
