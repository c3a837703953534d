#include "itscf/sisa/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace itscf::sisa {

namespace {

constexpr char kMagic[4] = {'S', 'I', 'S', 'A'};

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_tensor(std::vector<uint8_t>& out, const std::string& name, const nn::TensorView& t) {
    put_u16(out, static_cast<uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    out.push_back(t.rank);
    for (uint8_t d = 0; d < t.rank; ++d) put_u32(out, t.dims[d]);
    for (size_t i = 0; i < t.size; ++i) put_u64(out, std::bit_cast<uint64_t>(t.data[i]));
}

struct Reader {
    const std::vector<uint8_t>& bytes;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > bytes.size()) throw std::runtime_error("checkpoint parse: truncated file");
    }
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
};

struct RawTensor {
    std::string name;
    uint8_t rank = 0;
    uint32_t dims[2] = {0, 0};
    std::vector<double> payload;
};

RawTensor read_tensor(Reader& r) {
    RawTensor t;
    const uint16_t name_len = r.u16();
    r.need(name_len);
    t.name.assign(reinterpret_cast<const char*>(r.bytes.data()) + r.pos, name_len);
    r.pos += name_len;
    r.need(1);
    t.rank = r.bytes[r.pos++];
    if (t.rank < 1 || t.rank > 2) throw std::runtime_error("checkpoint parse: bad tensor rank");
    size_t count = 1;
    for (uint8_t d = 0; d < t.rank; ++d) {
        t.dims[d] = r.u32();
        count *= t.dims[d];
    }
    if (count == 0 || count > (1u << 28)) throw std::runtime_error("checkpoint parse: bad dims");
    t.payload.resize(count);
    for (double& v : t.payload) v = std::bit_cast<double>(r.u64());
    return t;
}

void fill_params(nn::ModelParams& p, const std::vector<RawTensor>& raw, size_t offset,
                 const std::string& prefix) {
    auto views = nn::tensor_views(p);
    for (size_t k = 0; k < views.size(); ++k) {
        const RawTensor& t = raw[offset + k];
        if (t.name != prefix + views[k].name)
            throw std::runtime_error("checkpoint parse: unexpected tensor name " + t.name);
        if (t.rank != views[k].rank || t.dims[0] != views[k].dims[0] ||
            (t.rank == 2 && t.dims[1] != views[k].dims[1]))
            throw std::runtime_error("checkpoint parse: shape mismatch for " + t.name);
        std::memcpy(views[k].data, t.payload.data(), t.payload.size() * sizeof(double));
    }
}

} // namespace

uint64_t fnv1a64(const uint8_t* data, size_t n) {
    uint64_t h = 14695981039346656037ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<uint8_t> serialize_checkpoint(const Checkpoint& c) {
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, kCheckpointVersion);
    put_u16(out, c.shard);
    put_u16(out, c.stage);
    put_u64(out, c.cursor.purpose_shard);
    put_u64(out, c.cursor.stage);
    put_u64(out, c.cursor.epoch);
    put_u64(out, c.cursor.draws);

    for (const nn::TensorView& t : nn::tensor_views(c.params)) put_tensor(out, t.name, t);
    {
        const double t_as_double = static_cast<double>(c.adam.t);
        nn::TensorView tv{"adam.t", 1, {1, 0}, const_cast<double*>(&t_as_double), 1};
        put_tensor(out, "adam.t", tv);
    }
    for (const nn::TensorView& t : nn::tensor_views(c.adam.m))
        put_tensor(out, std::string("adam.m.") + t.name, t);
    for (const nn::TensorView& t : nn::tensor_views(c.adam.v))
        put_tensor(out, std::string("adam.v.") + t.name, t);

    put_u64(out, fnv1a64(out.data(), out.size()));
    return out;
}

Checkpoint deserialize_checkpoint(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 4 + 2 + 2 + 2 + 32 + 8)
        throw std::runtime_error("checkpoint parse: file too small");
    const uint64_t stored = [&] {
        Reader tail{bytes, bytes.size() - 8};
        return tail.u64();
    }();
    if (fnv1a64(bytes.data(), bytes.size() - 8) != stored)
        throw std::runtime_error("checkpoint digest mismatch (corrupt file)");

    Reader r{bytes};
    r.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw std::runtime_error("checkpoint parse: bad magic");
    r.pos += 4;
    const uint16_t version = r.u16();
    if (version != kCheckpointVersion)
        throw std::runtime_error("checkpoint parse: unsupported version " + std::to_string(version));

    Checkpoint c;
    c.shard = r.u16();
    c.stage = r.u16();
    c.cursor.purpose_shard = r.u64();
    c.cursor.stage = r.u64();
    c.cursor.epoch = r.u64();
    c.cursor.draws = r.u64();

    std::vector<RawTensor> raw;
    while (r.pos < bytes.size() - 8) raw.push_back(read_tensor(r));
    if (r.pos != bytes.size() - 8) throw std::runtime_error("checkpoint parse: trailing bytes");

    // 14 parameter tensors, adam.t, then first/second moments.
    constexpr size_t kParamTensors = 14;
    if (raw.size() != kParamTensors * 3 + 1)
        throw std::runtime_error("checkpoint parse: unexpected tensor count");
    if (raw[0].name != "lstm1.w_ih" || raw[5].name != "lstm2.w_ih" || raw[10].name != "fc1.w" ||
        raw[12].name != "fc2.w")
        throw std::runtime_error("checkpoint parse: unexpected tensor order");

    nn::ModelConfig cfg;
    cfg.input_dim = static_cast<int>(raw[0].dims[1]);
    cfg.lstm1_hidden = static_cast<int>(raw[0].dims[0] / 4);
    cfg.lstm2_hidden = static_cast<int>(raw[5].dims[0] / 4);
    cfg.fc_hidden = static_cast<int>(raw[10].dims[0]);
    cfg.num_classes = static_cast<int>(raw[12].dims[0]);
    nn::validate_config(cfg);

    c.params = nn::zero_params(cfg);
    c.adam = nn::make_adam_state(cfg);
    fill_params(c.params, raw, 0, "");
    const RawTensor& t_tensor = raw[kParamTensors];
    if (t_tensor.name != "adam.t" || t_tensor.payload.size() != 1)
        throw std::runtime_error("checkpoint parse: missing adam step counter");
    c.adam.t = static_cast<uint64_t>(t_tensor.payload[0]);
    fill_params(c.adam.m, raw, kParamTensors + 1, "adam.m.");
    fill_params(c.adam.v, raw, kParamTensors * 2 + 1, "adam.v.");
    return c;
}

CheckpointStore::CheckpointStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path CheckpointStore::path_for(int shard, int stage) const {
    char name[64];
    std::snprintf(name, sizeof(name), "shard%03d_stage%02d.ckpt", shard, stage);
    return dir_ / name;
}

bool CheckpointStore::contains(int shard, int stage) const {
    return std::filesystem::exists(path_for(shard, stage));
}

void CheckpointStore::save(const Checkpoint& c) {
    const std::vector<uint8_t> bytes = serialize_checkpoint(c);
    const std::filesystem::path final_path = path_for(c.shard, c.stage);
    const std::filesystem::path tmp_path = final_path.string() + ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("checkpoint store: cannot write " + tmp_path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("checkpoint store: short write " + tmp_path.string());
    }
    std::filesystem::rename(tmp_path, final_path);
}

Checkpoint CheckpointStore::load(int shard, int stage) const {
    const std::filesystem::path path = path_for(shard, stage);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint store: missing " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    Checkpoint c = deserialize_checkpoint(bytes);
    if (c.shard != shard || c.stage != stage)
        throw std::runtime_error("checkpoint store: file " + path.string() +
                                 " holds a different shard/stage");
    return c;
}

} // namespace itscf::sisa
