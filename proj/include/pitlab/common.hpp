// pitlab/common.hpp

// Copyright 2026  pit-lab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PITLAB_COMMON_HPP_
#define PITLAB_COMMON_HPP_

#include <sstream>
#include <stdexcept>
#include <string>

namespace pitlab {

// Malformed inputs: size mismatches, invalid configs, broken files.
class StructuralError : public std::invalid_argument {
 public:
  explicit StructuralError(const std::string &msg)
      : std::invalid_argument(msg) {}
};

// Inputs that are well-formed but mathematically degenerate
// (zero-energy reference, empty distractor pool, ...).
class DegenerateInputError : public std::domain_error {
 public:
  explicit DegenerateInputError(const std::string &msg)
      : std::domain_error(msg) {}
};

// Valid request outside what this code path supports; the message names
// the alternative to use.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string &msg)
      : std::runtime_error(msg) {}
};

namespace internal {
template <typename E>
[[noreturn]] inline void ThrowFormatted(const char *cond, const char *file,
                                        int line, const std::string &extra) {
  std::ostringstream os;
  os << file << ":" << line << ": check failed: " << cond;
  if (!extra.empty()) os << " (" << extra << ")";
  throw E(os.str());
}
}  // namespace internal

}  // namespace pitlab

#define PITLAB_CHECK_STRUCTURAL(cond, msg)                               \
  do {                                                                   \
    if (!(cond))                                                         \
      ::pitlab::internal::ThrowFormatted<::pitlab::StructuralError>(     \
          #cond, __FILE__, __LINE__, (msg));                             \
  } while (0)

#define PITLAB_CHECK_DEGENERATE(cond, msg)                               \
  do {                                                                   \
    if (!(cond))                                                         \
      ::pitlab::internal::ThrowFormatted<::pitlab::DegenerateInputError>(\
          #cond, __FILE__, __LINE__, (msg));                             \
  } while (0)

#endif  // PITLAB_COMMON_HPP_
