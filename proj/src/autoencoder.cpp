#include "d3r/autoencoder.hpp"

namespace d3r::ae {

std::vector<LayerSpec> make_architecture(int in_channels, const std::vector<int>& encoder_channels) {
    if (encoder_channels.empty()) throw DataError("architecture needs at least one encoder block");
    std::vector<LayerSpec> arch;
    int ch = in_channels;
    for (int out : encoder_channels) {
        arch.push_back({LayerKind::Conv, ch, out});
        arch.push_back({LayerKind::BatchNorm, out, out});
        arch.push_back({LayerKind::ReLU, out, out});
        ch = out;
    }
    for (size_t i = encoder_channels.size(); i-- > 0;) {
        const int out = i == 0 ? in_channels : encoder_channels[i - 1];
        arch.push_back({LayerKind::ConvTranspose, ch, out});
        if (i == 0) {
            arch.push_back({LayerKind::Sigmoid, out, out});
        } else {
            arch.push_back({LayerKind::BatchNorm, out, out});
            arch.push_back({LayerKind::ReLU, out, out});
        }
        ch = out;
    }
    return arch;
}

} // namespace d3r::ae
