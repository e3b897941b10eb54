#pragma once

#include <optional>
#include <string>

#include "d3r/autoencoder.hpp"

namespace d3r::ckpt {

// D3RCKPT container:
//   magic "D3RCKPT" (7 bytes), u32 version, u32 epochs_completed,
//   u32 layer count, per layer { u8 kind, u32 in_ch, u32 out_ch },
//   u32 tensor count, per tensor { u32 name length, name bytes, u32 rank,
//   u32 dims..., float32 little-endian data },
//   u8 has_optimizer, then optimizer m/v tensors in the same record format
//   followed by u64 step counter.
// Round trips are bit-exact.
constexpr uint32_t kVersion = 1;

struct Checkpoint {
    ae::ModelParams<float> params;
    std::optional<ae::AdamState<float>> optim;
    uint32_t epochs_completed = 0;
};

void save_checkpoint(const std::string& path, const ae::ModelParams<float>& params,
                     const ae::AdamState<float>* optim, uint32_t epochs_completed);

Checkpoint load_checkpoint(const std::string& path);

} // namespace d3r::ckpt
