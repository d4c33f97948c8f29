// Copyright 2026 The biqap Authors
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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "biqap/channels.hpp"
#include "biqap/measures.hpp"

namespace biqap::cli {

using Json = nlohmann::ordered_json;

/** Bad input file or flag; maps to exit code 2. */
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(cplx z);
Json to_json(const CMat& m);
Json to_json(const measures::BoundReport& r);

/** Numbers or [re, im] pairs, row-major nested arrays. */
CMat matrix_from_json(const Json& j, const std::string& where);
std::vector<CMat> matrices_from_json(const Json& j, const std::string& where);

/** Parses a file; syntax errors carry file:line:col. */
Json load_json_file(const std::string& path);
Json parse_json_text(const std::string& text, const std::string& origin);

/** What a channel file describes. */
struct ChannelSpec {
  enum class Kind { point_to_point, bidirectional, cell };
  Kind kind = Kind::bidirectional;
  std::string name;
  std::optional<channels::ChannelChoi> channel;
  std::optional<channels::BidirectionalChannel> bidirectional;
  std::optional<channels::WiretapMemoryCell> cell;
  /** Set when the bidirectional channel was given as a unitary. */
  std::optional<CMat> unitary;
  /** Inline representations, if the file carries them. */
  std::optional<Json> reps;
};

ChannelSpec channel_from_json(const Json& j);

/** "pauli", "hw:<d>", "identity:<d>" or a list of matrices. */
channels::GroupRep group_from_json(const Json& j, const std::string& where);

/**
 * {"in_a", "in_b"} plus either explicit "out_a"/"out_b" or
 * "outputs": "from_unitary" for channels given as a unitary, or
 * "outputs": "local" for V^{gh} = U^g, W^{gh} = U^h.
 */
channels::BicovariantReps reps_from_json(const Json& j, const ChannelSpec& ch);

/** Writes to a temp file in the target directory and renames it into place. */
void write_atomic(const std::string& path, const std::string& content);

}  // namespace biqap::cli
