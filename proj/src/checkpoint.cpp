#include "d3r/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "d3r/errors.hpp"

namespace d3r::ckpt {

namespace {

constexpr char kMagic[7] = {'D', '3', 'R', 'C', 'K', 'P', 'T'};

void put_u32(std::ostream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& out, uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_u8(std::ostream& out, uint8_t v) { out.write(reinterpret_cast<const char*>(&v), 1); }

uint32_t get_u32(std::istream& in, const std::string& path) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (!in) throw DataError("truncated checkpoint: " + path);
    return v;
}
uint64_t get_u64(std::istream& in, const std::string& path) {
    uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    if (!in) throw DataError("truncated checkpoint: " + path);
    return v;
}
uint8_t get_u8(std::istream& in, const std::string& path) {
    uint8_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 1);
    if (!in) throw DataError("truncated checkpoint: " + path);
    return v;
}

void put_tensor(std::ostream& out, const std::string& name, const Tensor<float>& t) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<uint32_t>(t.rank()));
    for (int i = 0; i < t.rank(); ++i) put_u32(out, static_cast<uint32_t>(t.dim(i)));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.numel() * sizeof(float)));
}

std::pair<std::string, Tensor<float>> get_tensor(std::istream& in, const std::string& path) {
    const uint32_t name_len = get_u32(in, path);
    if (name_len > 4096) throw DataError("corrupt checkpoint (bad name length): " + path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const uint32_t rank = get_u32(in, path);
    if (rank > 4) throw DataError("corrupt checkpoint (bad rank): " + path);
    std::vector<long> shape;
    for (uint32_t i = 0; i < rank; ++i) shape.push_back(static_cast<long>(get_u32(in, path)));
    Tensor<float> t(shape);
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.numel() * sizeof(float)));
    if (!in) throw DataError("truncated checkpoint: " + path);
    return {std::move(name), std::move(t)};
}

std::vector<std::pair<std::string, const Tensor<float>*>> named_tensors(const ae::ModelParams<float>& p) {
    std::vector<std::pair<std::string, const Tensor<float>*>> out;
    for (size_t i = 0; i < p.convs.size(); ++i) {
        const std::string base = "conv" + std::to_string(i);
        out.emplace_back(base + ".w", &p.convs[i].w);
        out.emplace_back(base + ".b", &p.convs[i].b);
    }
    for (size_t i = 0; i < p.bns.size(); ++i) {
        const std::string base = "bn" + std::to_string(i);
        out.emplace_back(base + ".gamma", &p.bns[i].gamma);
        out.emplace_back(base + ".beta", &p.bns[i].beta);
        out.emplace_back(base + ".running_mean", &p.bns[i].running_mean);
        out.emplace_back(base + ".running_var", &p.bns[i].running_var);
    }
    return out;
}

} // namespace

void save_checkpoint(const std::string& path, const ae::ModelParams<float>& params,
                     const ae::AdamState<float>* optim, uint32_t epochs_completed) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);
    put_u32(out, epochs_completed);

    put_u32(out, static_cast<uint32_t>(params.arch.size()));
    for (const auto& layer : params.arch) {
        put_u8(out, static_cast<uint8_t>(layer.kind));
        put_u32(out, static_cast<uint32_t>(layer.in_ch));
        put_u32(out, static_cast<uint32_t>(layer.out_ch));
    }

    const auto tensors = named_tensors(params);
    put_u32(out, static_cast<uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) put_tensor(out, name, *t);

    put_u8(out, optim ? 1 : 0);
    if (optim) {
        put_u32(out, static_cast<uint32_t>(optim->m.size()));
        for (size_t i = 0; i < optim->m.size(); ++i) {
            put_tensor(out, "m" + std::to_string(i), optim->m[i]);
            put_tensor(out, "v" + std::to_string(i), optim->v[i]);
        }
        put_u64(out, static_cast<uint64_t>(optim->step));
    }
    if (!out) throw DataError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    char magic[7];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("not a D3RCKPT file: " + path);
    const uint32_t version = get_u32(in, path);
    if (version != kVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version) + " in " + path);

    Checkpoint ck;
    ck.epochs_completed = get_u32(in, path);

    const uint32_t n_layers = get_u32(in, path);
    if (n_layers > 1024) throw DataError("corrupt checkpoint (layer count): " + path);
    std::vector<ae::LayerSpec> arch;
    int encoder_convs = 0;
    bool seen_convt = false;
    for (uint32_t i = 0; i < n_layers; ++i) {
        ae::LayerSpec spec;
        spec.kind = static_cast<ae::LayerKind>(get_u8(in, path));
        spec.in_ch = static_cast<int>(get_u32(in, path));
        spec.out_ch = static_cast<int>(get_u32(in, path));
        if (spec.kind == ae::LayerKind::ConvTranspose) seen_convt = true;
        if (!seen_convt) ++encoder_convs;
        arch.push_back(spec);
    }
    ck.params.arch = arch;
    ck.params.encoder_layers = static_cast<size_t>(encoder_convs);

    const uint32_t n_tensors = get_u32(in, path);
    std::vector<std::pair<std::string, Tensor<float>>> tensors;
    for (uint32_t i = 0; i < n_tensors; ++i) tensors.push_back(get_tensor(in, path));

    // Rebuild param containers in architecture order and bind tensors by name.
    size_t conv_i = 0, bn_i = 0;
    auto find = [&](const std::string& name) -> Tensor<float>& {
        for (auto& [n, t] : tensors)
            if (n == name) return t;
        throw DataError("checkpoint missing tensor " + name + ": " + path);
    };
    for (const auto& layer : arch) {
        if (layer.kind == ae::LayerKind::Conv || layer.kind == ae::LayerKind::ConvTranspose) {
            ae::ConvTensors<float> c;
            c.w = find("conv" + std::to_string(conv_i) + ".w");
            c.b = find("conv" + std::to_string(conv_i) + ".b");
            ck.params.convs.push_back(std::move(c));
            ++conv_i;
        } else if (layer.kind == ae::LayerKind::BatchNorm) {
            ae::BnTensors<float> b;
            const std::string base = "bn" + std::to_string(bn_i);
            b.gamma = find(base + ".gamma");
            b.beta = find(base + ".beta");
            b.running_mean = find(base + ".running_mean");
            b.running_var = find(base + ".running_var");
            ck.params.bns.push_back(std::move(b));
            ++bn_i;
        }
    }

    if (get_u8(in, path)) {
        ae::AdamState<float> st;
        const uint32_t n_slots = get_u32(in, path);
        for (uint32_t i = 0; i < n_slots; ++i) {
            st.m.push_back(get_tensor(in, path).second);
            st.v.push_back(get_tensor(in, path).second);
        }
        st.step = static_cast<long>(get_u64(in, path));
        ck.optim = std::move(st);
    }
    return ck;
}

} // namespace d3r::ckpt
