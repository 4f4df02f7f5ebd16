#pragma once

#include <memory>
#include <string>

#include "rsir/backbone.hpp"

namespace rsir {

class SeqEmbModel;
class MarkovModel;

/// Binary checkpoint, little-endian:
///
///   offset 0   char[8]  magic "RSIRCKPT"
///          8   u32      format version (1)
///         12   u32      kind (1 = seqemb, 2 = markov)
///         16   u64      number of items
///   seqemb:    u64 dim, f64 gamma, f64[items*dim] input table,
///              f64[items*dim] output table (row-major)
///   markov:    f64 alpha, u64 nonzeros, then per nonzero
///              u32 from, u32 to, u64 count (sorted by from, then to)
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_model(const Model& model, const std::string& path);

/// Throws Error(Load) on bad magic, unknown version or kind, or truncation.
std::unique_ptr<Model> load_model(const std::string& path);

/// As load_model, but also throws Error(Load) when the file holds the other
/// backbone kind.
SeqEmbModel load_seq_emb(const std::string& path);
MarkovModel load_markov(const std::string& path);

}  // namespace rsir
