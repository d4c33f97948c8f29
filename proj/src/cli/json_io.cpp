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

#include "cli/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace biqap::cli {

namespace {

int get_int(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
    throw ConfigError(where + ": missing integer field \"" + key + "\"");
  }
  const int v = obj.at(key).get<int>();
  if (v < 1) throw ConfigError(where + ": \"" + key + "\" must be positive");
  return v;
}

cplx scalar_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(where + ": expected a number or [re, im]");
}

std::pair<long, long> line_col(const std::string& text, std::size_t byte) {
  long line = 1, col = 1;
  for (std::size_t k = 0; k < text.size() && k + 1 < byte; ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMat& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const measures::BoundReport& r) {
  Json j;
  j["name"] = r.name;
  j["value_bits"] = r.value_bits;
  j["linear_value"] = r.linear_value;
  j["kind"] = measures::to_string(r.kind);
  j["status"] = conic::to_string(r.status);
  j["gap"] = r.gap;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["trace"] = r.trace;
  return j;
}

CMat matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError(where + ": expected a nested array (matrix)");
  }
  const long rows = static_cast<long>(j.size());
  const long cols = static_cast<long>(j[0].size());
  CMat m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<long>(j[r].size()) != cols) {
      throw ConfigError(where + ": ragged matrix at row " + std::to_string(r));
    }
    for (long c = 0; c < cols; ++c) {
      m(r, c) = scalar_from_json(j[r][c], where + "[" + std::to_string(r) + "][" +
                                              std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<CMat> matrices_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a list of matrices");
  std::vector<CMat> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(matrix_from_json(j[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    std::string msg = e.what();
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_json_text(ss.str(), path);
}

ChannelSpec channel_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("channel: top level must be an object");
  if (!j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError("channel: missing string field \"type\"");
  }
  const std::string type = j.at("type").get<std::string>();
  ChannelSpec spec;
  spec.name = j.value("name", type);
  if (j.contains("reps")) spec.reps = j.at("reps");
  try {
    if (type == "bidirectional") {
      spec.kind = ChannelSpec::Kind::bidirectional;
      if (!j.contains("dims")) throw ConfigError("channel: missing \"dims\"");
      const Json& d = j.at("dims");
      const int sa = get_int(d, "S_A", "dims"), a = get_int(d, "A", "dims");
      const int b = get_int(d, "B", "dims"), sb = get_int(d, "S_B", "dims");
      if (j.contains("unitary")) {
        const CMat u = matrix_from_json(j.at("unitary"), "unitary");
        if (u.rows() != static_cast<long>(a) * b || u.cols() != static_cast<long>(sa) * sb) {
          throw ConfigError("unitary: shape does not match dims");
        }
        spec.bidirectional = channels::bidirectional_from_kraus({u}, sa, sb, a, b);
        spec.unitary = u;
      } else if (j.contains("kraus")) {
        spec.bidirectional =
            channels::bidirectional_from_kraus(matrices_from_json(j.at("kraus"), "kraus"), sa, sb, a, b);
      } else if (j.contains("choi")) {
        spec.bidirectional =
            channels::bidirectional_from_choi(matrix_from_json(j.at("choi"), "choi"), sa, a, b, sb);
      } else {
        throw ConfigError("channel: bidirectional needs \"unitary\", \"kraus\" or \"choi\"");
      }
    } else if (type == "channel") {
      spec.kind = ChannelSpec::Kind::point_to_point;
      if (!j.contains("dims")) throw ConfigError("channel: missing \"dims\"");
      const Json& d = j.at("dims");
      const int din = get_int(d, "in", "dims"), dout = get_int(d, "out", "dims");
      if (j.contains("kraus")) {
        const auto k = matrices_from_json(j.at("kraus"), "kraus");
        for (const auto& m : k) {
          if (m.rows() != dout || m.cols() != din) throw ConfigError("kraus: shape does not match dims");
        }
        spec.channel = channels::choi_from_kraus(k);
      } else if (j.contains("choi")) {
        spec.channel = channels::ChannelChoi(matrix_from_json(j.at("choi"), "choi"), din, dout);
      } else {
        throw ConfigError("channel: point-to-point needs \"kraus\" or \"choi\"");
      }
    } else if (type == "cell") {
      spec.kind = ChannelSpec::Kind::cell;
      if (!j.contains("dims")) throw ConfigError("channel: missing \"dims\"");
      const Json& d = j.at("dims");
      const int din = get_int(d, "in", "dims"), dout = get_int(d, "out", "dims");
      const int denv = get_int(d, "env", "dims");
      if (!j.contains("isometries")) throw ConfigError("cell: missing \"isometries\"");
      channels::WiretapMemoryCell cell;
      for (const auto& v : matrices_from_json(j.at("isometries"), "isometries")) {
        if (v.rows() != static_cast<long>(dout) * denv || v.cols() != din) {
          throw ConfigError("isometries: shape does not match dims");
        }
        channels::IsometricExtension u;
        u.V = v;
        u.d_in = din;
        u.d_out = dout;
        u.d_env = denv;
        cell.elements.push_back(u);
      }
      cell.validate();
      spec.cell = cell;
    } else if (type == "named") {
      spec.kind = ChannelSpec::Kind::bidirectional;
      const std::string which = j.value("channel", std::string());
      const int d = j.contains("d") ? get_int(j, "d", "named") : 2;
      CMat u;
      if (which == "cnot") {
        if (d != 2) throw ConfigError("named: cnot is a two-qubit gate");
        u = channels::cnot_matrix();
      } else if (which == "swap") {
        u = channels::swap_matrix(d);
      } else if (which == "identity") {
        u = CMat::Identity(d * d, d * d);
      } else {
        throw ConfigError("named: unknown channel \"" + which + "\"");
      }
      spec.name = j.value("name", which);
      spec.bidirectional = channels::bidirectional_from_unitary(u, d, d);
      spec.unitary = u;
    } else if (type == "erasure_cell") {
      spec.kind = ChannelSpec::Kind::cell;
      const int d = get_int(j, "d", "erasure_cell");
      if (!j.contains("q") || !j.at("q").is_number()) throw ConfigError("erasure_cell: missing \"q\"");
      spec.cell = channels::erasure_wiretap_cell(d, j.at("q").get<double>());
    } else {
      throw ConfigError("channel: unknown type \"" + type + "\"");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  }
  return spec;
}

channels::GroupRep group_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "pauli") return channels::pauli_group();
    auto arg = [&](const std::string& prefix) -> int {
      if (s.rfind(prefix, 0) != 0) return 0;
      try {
        return std::stoi(s.substr(prefix.size()));
      } catch (const std::exception&) {
        throw ConfigError(where + ": bad group \"" + s + "\"");
      }
    };
    if (const int d = arg("hw:"); d >= 2) return channels::heisenberg_weyl_group(d);
    if (const int d = arg("identity:"); d >= 1) {
      channels::GroupRep g;
      g.elements = {CMat::Identity(d, d)};
      g.labels = {"I"};
      return g;
    }
    throw ConfigError(where + ": unknown group \"" + s + "\"");
  }
  channels::GroupRep g;
  g.elements = matrices_from_json(j, where);
  for (std::size_t k = 0; k < g.elements.size(); ++k) g.labels.push_back("g" + std::to_string(k));
  return g;
}

channels::BicovariantReps reps_from_json(const Json& j, const ChannelSpec& ch) {
  if (!j.is_object() || !j.contains("in_a") || !j.contains("in_b")) {
    throw ConfigError("reps: need \"in_a\" and \"in_b\"");
  }
  const auto in_a = group_from_json(j.at("in_a"), "reps.in_a");
  const auto in_b = group_from_json(j.at("in_b"), "reps.in_b");
  if (j.value("outputs", std::string()) == "from_unitary") {
    if (!ch.unitary) throw ConfigError("reps: \"from_unitary\" needs a channel given by \"unitary\"");
    try {
      return channels::unitary_output_reps(*ch.unitary, in_a, in_b);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("reps: ") + e.what());
    }
  }
  if (j.value("outputs", std::string()) == "local") {
    channels::BicovariantReps r;
    r.in_a = in_a;
    r.in_b = in_b;
    for (int g = 0; g < in_a.size(); ++g) {
      for (int h = 0; h < in_b.size(); ++h) {
        r.out_a.push_back(in_a.elements[g]);
        r.out_b.push_back(in_b.elements[h]);
      }
    }
    return r;
  }
  if (!j.contains("out_a") || !j.contains("out_b")) {
    throw ConfigError("reps: need \"out_a\"/\"out_b\" or \"outputs\": \"from_unitary\"");
  }
  channels::BicovariantReps r;
  r.in_a = in_a;
  r.in_b = in_b;
  r.out_a = matrices_from_json(j.at("out_a"), "reps.out_a");
  r.out_b = matrices_from_json(j.at("out_b"), "reps.out_b");
  if (static_cast<int>(r.out_a.size()) != r.pairs() || static_cast<int>(r.out_b.size()) != r.pairs()) {
    throw ConfigError("reps: need |G|·|H| output unitaries, index g·|H| + h");
  }
  return r;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError(path + ": cannot write output");
    os << content;
    os.flush();
    if (!os) throw ConfigError(path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError(path + ": cannot move output into place");
  }
}

}  // namespace biqap::cli
