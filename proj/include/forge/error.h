// Copyright 2026 The Corpus Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORGE_ERROR_H_
#define FORGE_ERROR_H_

#include <stdexcept>
#include <string>

namespace forge {

// Raised for bad input: malformed files, invalid parameters, contract
// violations by the caller. The CLI maps it to exit code 1; anything else
// escaping is an internal error (exit code 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace forge

#endif  // FORGE_ERROR_H_
