#pragma once

#include <map>
#include <string>
#include <vector>

#include "spectran/numkit/matrix.hpp"
#include "spectran/numkit/param_store.hpp"

namespace spectran::adapter {

/// Checkpoint file: named tensors serialized as concatenated EMB1 blobs,
/// followed by a plain-text manifest ("name rows cols offset" per line), a
/// little-endian uint64 manifest offset and the trailer magic "CKPT".
/// Scalar metadata rides along as 1x1 tensors under "meta.*" names.
struct Checkpoint {
  std::vector<std::pair<std::string, numkit::Matrix>> tensors;

  bool has(const std::string& name) const;
  const numkit::Matrix& tensor(const std::string& name) const;
  double meta(const std::string& name) const;  // value of a 1x1 meta tensor
  void set(const std::string& name, numkit::Matrix m);
  void set_meta(const std::string& name, double v);

  static Checkpoint from_params(const numkit::ParamStore& params);
  void restore_params(numkit::ParamStore& params) const;  // by matching names
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace spectran::adapter
