/*
 * Copyright 2026 The stencil-forge authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace sf {

enum class ErrCode {
  EmptyBox,
  RankMismatch,
  UnboundedImage,
  UnboundParameter,
  ParseError,
  NonAffine,
  NonCanonicalNest,
  NonConstantDependence,
  NoLegalTiling,
  UnburstableShip,
  SentinelLeak,
  OutOfFootprint,
  Internal,
};

const char *err_name(ErrCode c);

class Error : public std::runtime_error {
public:
  ErrCode code;
  Error(ErrCode c, const std::string &msg)
      : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void fail(ErrCode c, const std::string &msg) {
  throw Error(c, msg);
}

} // namespace sf
