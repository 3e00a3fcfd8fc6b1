/*
 * Copyright 2026 The moddyn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "moddyn/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "moddyn/error.hpp"

namespace moddyn {

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos
                                            ? std::string_view::npos
                                            : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Split parse_split(const std::string& s, const std::string& where) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  throw FormatError(where + ": unknown split '" + s +
                    "' (expected train, valid or test)");
}

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "train";
}

std::vector<const ManifestRecord*> DatasetManifest::in_split(Split s) const {
  std::vector<const ManifestRecord*> out;
  for (const auto& r : records) {
    if (r.split == s) out.push_back(&r);
  }
  return out;
}

std::filesystem::path DatasetManifest::resolve(const ManifestRecord& r) const {
  const std::filesystem::path p(r.path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> DatasetManifest::overlapping_speakers() const {
  std::map<std::string, std::set<Split>> seen;
  for (const auto& r : records) seen[r.speaker].insert(r.split);
  std::vector<std::string> out;
  for (const auto& [spk, splits] : seen) {
    if (splits.size() > 1) out.push_back(spk);
  }
  return out;
}

DatasetManifest parse_manifest_text(std::string_view text,
                                    const std::filesystem::path& base_dir,
                                    SpeakerCheck check,
                                    std::string_view source) {
  DatasetManifest m;
  m.base_dir = base_dir;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line != "id,path,label,speaker,split") {
        throw FormatError(where + ": expected header 'id,path,label,speaker,split'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != 5) {
      throw FormatError(where + ": expected 5 columns, found " +
                        std::to_string(cols.size()));
    }
    ManifestRecord r;
    r.id = cols[0];
    r.path = cols[1];
    if (r.id.empty()) throw FormatError(where + ": empty id");
    if (r.path.empty()) throw FormatError(where + ": empty path");
    if (cols[2] == "0" || cols[2] == "1") {
      r.label = cols[2][0] - '0';
    } else {
      throw FormatError(where + ": label '" + cols[2] + "' is not 0 or 1");
    }
    r.speaker = cols[3];
    if (r.speaker.empty()) throw FormatError(where + ": empty speaker");
    r.split = parse_split(cols[4], where);
    if (!ids.insert(r.id).second) {
      throw FormatError(where + ": duplicate id '" + r.id + "'");
    }
    m.records.push_back(std::move(r));
  }
  if (!header_seen) throw FormatError(std::string(source) + ": empty manifest");

  if (check != SpeakerCheck::kIgnore) {
    for (const auto& spk : m.overlapping_speakers()) {
      const std::string msg = std::string(source) + ": speaker '" + spk +
                              "' appears in more than one split";
      if (check == SpeakerCheck::kStrict) throw FormatError(msg);
      m.warnings.push_back(msg);
    }
  }
  return m;
}

DatasetManifest parse_manifest(const std::filesystem::path& path,
                               SpeakerCheck check) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest_text(ss.str(), path.parent_path(), check, path.string());
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "id,path,label,speaker,split\n";
  for (const auto& r : m.records) {
    out << r.id << ',' << r.path << ',' << r.label << ',' << r.speaker << ','
        << to_string(r.split) << '\n';
  }
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace moddyn
