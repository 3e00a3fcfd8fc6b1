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

#include "moddyn/checkpoint.hpp"

#include <cmath>
#include <string>

#include "moddyn/binary_io.hpp"
#include "moddyn/error.hpp"

namespace moddyn {

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  ckpt.params.validate();
  RunConfig cfg = ckpt.config;
  cfg.model = ckpt.params.config;

  ByteWriter w;
  w.put_bytes("WRXC");
  w.put_u32(kCheckpointVersion);
  w.put_string(to_config_text(cfg));
  const auto names = ckpt.params.weights.tensor_names();
  const auto tensors = ckpt.params.weights.tensors();
  w.put_u32(static_cast<std::uint32_t>(tensors.size()));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    w.put_string(names[i]);
    w.put_u32(static_cast<std::uint32_t>(tensors[i].size()));
    for (double x : tensors[i]) w.put_f32(static_cast<float>(x));
  }
  const auto& mask = ckpt.params.prune_mask;
  w.put_u32(static_cast<std::uint32_t>(mask.size()));
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    w.put_f32(static_cast<float>(mask[i]));
  }
  return w.bytes();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes,
                             const std::string& context) {
  ByteReader r(bytes, context);
  if (r.get_bytes(4) != "WRXC") throw FormatError(context + ": bad magic");
  const std::uint32_t version = r.get_u32();
  if (version != kCheckpointVersion) {
    throw FormatError(context + ": unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.config = parse_config(r.get_string(), context + " (embedded config)");

  // Allocate shapes from the embedded config, then fill.
  ModelConfig mc = ckpt.config.model;
  mc.prune_pct = 0.0;
  ckpt.params = init_params(mc);
  ckpt.params.config = ckpt.config.model;

  auto tensors = ckpt.params.weights.tensors();
  const auto names = ckpt.params.weights.tensor_names();
  const std::uint32_t n = r.get_u32();
  if (n != tensors.size()) {
    throw FormatError(context + ": expected " + std::to_string(tensors.size()) +
                      " tensors, found " + std::to_string(n));
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const std::string name = r.get_string();
    if (name != names[i]) {
      throw FormatError(context + ": tensor " + std::to_string(i) + " is '" +
                        name + "', expected '" + names[i] + "'");
    }
    const std::uint32_t count = r.get_u32();
    if (count != tensors[i].size()) {
      throw FormatError(context + ": tensor '" + name + "' has " +
                        std::to_string(count) + " values, expected " +
                        std::to_string(tensors[i].size()));
    }
    for (double& x : tensors[i]) x = r.get_f32();
  }
  const std::uint32_t mask_n = r.get_u32();
  if (mask_n != ckpt.params.config.embed_dim) {
    throw FormatError(context + ": prune mask size mismatch");
  }
  ckpt.params.prune_mask.resize(mask_n);
  for (std::uint32_t i = 0; i < mask_n; ++i) ckpt.params.prune_mask[i] = r.get_f32();
  if (r.remaining() != 0) {
    throw FormatError(context + ": " + std::to_string(r.remaining()) +
                      " trailing bytes");
  }
  try {
    ckpt.params.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(context + ": " + e.what());
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file_bytes(path), "checkpoint " + path.string());
}

}  // namespace moddyn
