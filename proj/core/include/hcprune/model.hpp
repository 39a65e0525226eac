#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcprune/gates.hpp"
#include "hcprune/rng.hpp"
#include "hcprune/tensor.hpp"

namespace hcprune {

struct EncoderConfig {
  std::size_t n_layers = 4;
  std::size_t d_hidden = 64;
  std::size_t n_heads = 4;
  std::size_t d_head = 16;
  std::size_t d_ffn = 256;
  std::size_t max_seq_len = 32;
  std::size_t input_dim = 16;

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

// One attention head. Column counts may differ per head in compacted models;
// a head with dq()==0 degenerates to uniform attention, one with dv()==0
// contributes nothing and is normally deleted outright.
struct HeadWeights {
  Tensor wq, bq;   // d_hidden x dq, dq
  Tensor wk, bk;   // d_hidden x dq, dq
  Tensor wv, bv;   // d_hidden x dv, dv
  Tensor wo_rows;  // dv x d_hidden; this head's rows of the output projection
  double attn_scale = 1.0;  // multiplier on the attention logits

  std::size_t dq() const { return wq.cols(); }
  std::size_t dv() const { return wv.cols(); }
};

struct BlockWeights {
  bool has_mha = true;
  bool has_ffn = true;
  std::vector<HeadWeights> heads;
  Tensor bo;       // d_hidden; survives as a bias-only sublayer if every head dies
  Tensor wu, bu;   // d_hidden x k_int, k_int
  Tensor wd, bd;   // k_int x d_hidden, d_hidden
  Tensor ln1_g, ln1_b;
  Tensor ln2_g, ln2_b;
};

// Pre-norm transformer encoder: x + mha(ln1(x)), then x + ffn(ln2(x)).
// Usable dense (teacher), gated (student in training) or compacted.
struct EncoderModel {
  EncoderConfig config;
  Tensor w_in, b_in;  // input_dim x d_hidden
  Tensor pos_enc;     // max_seq_len x d_hidden, fixed sinusoidal table
  Tensor w_out, b_out;
  std::vector<BlockWeights> blocks;

  static EncoderModel random_init(const EncoderConfig& config, Rng& rng);

  long param_count() const;        // stored weights and biases; pos_enc excluded
  long prunable_param_count() const;
  std::uint64_t checksum() const;  // content hash over every stored tensor
};

Tensor sinusoidal_positions(std::size_t max_seq_len, std::size_t d_hidden);

// Raw-weight count one gate element controls under the column/row counting
// convention (a qk element owns one W_Q and one W_K column plus both biases,
// and so on). Coarse granularities return the whole sublayer's prunable
// count.
long params_controlled(const EncoderConfig& config, Granularity g);

// ---------------------------------------------------------------------------
// Checkpoint container: text header (format version, kind, config, block
// structure, optional gate groups, tensor directory with name/shape/offset)
// followed by a little-endian raw float64 payload. The same format carries
// dense, gated and compacted models.

struct Checkpoint {
  std::string kind;  // "dense", "gated" or "compact"
  EncoderModel model;
  std::vector<GateGroup> gates;  // non-empty iff kind == "gated"
};

void save_checkpoint(const std::string& path, const std::string& kind, const EncoderModel& model,
                     const std::vector<GateGroup>* gates = nullptr);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hcprune
