#include <bit>
#include <cstring>
#include <fstream>

#include "cdn/model/checkpoint.hpp"
#include "json.hpp"

namespace cdn::model {

namespace {
constexpr char kMagic[4] = {'C', 'D', 'N', '1'};

static_assert(sizeof(float) == 4);

void write_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

// Parameter floats are stored verbatim; on the (ubiquitous) little-endian
// targets this is a straight memcpy, elsewhere bytes are swapped.
void write_f32_le(std::ostream& os, const std::vector<float>& values) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * 4));
  } else {
    for (float f : values) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      unsigned char buf[4] = {static_cast<unsigned char>(u),
                              static_cast<unsigned char>(u >> 8),
                              static_cast<unsigned char>(u >> 16),
                              static_cast<unsigned char>(u >> 24)};
      os.write(reinterpret_cast<const char*>(buf), 4);
    }
  }
}

void read_f32_le(std::istream& is, std::vector<float>& values) {
  if constexpr (std::endian::native == std::endian::little) {
    is.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * 4));
  } else {
    for (float& f : values) {
      unsigned char buf[4];
      is.read(reinterpret_cast<char*>(buf), 4);
      std::uint32_t u = buf[0] | (buf[1] << 8) | (buf[2] << 16) |
                        (static_cast<std::uint32_t>(buf[3]) << 24);
      std::memcpy(&f, &u, 4);
    }
  }
}
}  // namespace

Checkpoint Checkpoint::from_model(const CdnModel& m, int epoch,
                                  float best_val_loss) {
  Checkpoint ckpt;
  ckpt.config = m.config();
  ckpt.vocabulary = m.vocab();
  ckpt.epoch = epoch;
  ckpt.best_val_loss = best_val_loss;
  for (const nn::Parameter* p : m.parameters()) {
    Block b;
    b.name = p->name;
    b.shape = p->value.shape();
    b.data.assign(p->value.data(), p->value.data() + p->value.size());
    ckpt.blocks.push_back(std::move(b));
  }
  return ckpt;
}

CdnModel Checkpoint::to_model() const {
  CdnModel m(config, vocabulary, config.seed);
  for (const Block& b : blocks) {
    nn::Parameter* p = m.find_parameter(b.name);
    if (!p) throw CheckpointError("unknown parameter block: " + b.name);
    if (p->value.shape() != b.shape)
      throw CheckpointError("shape mismatch for block: " + b.name);
    std::copy(b.data.begin(), b.data.end(), p->value.data());
  }
  return m;
}

void Checkpoint::save(const std::string& path) const {
  nlohmann::json dir = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const Block& b : blocks) {
    dir.push_back({{"name", b.name}, {"shape", b.shape}, {"offset", offset}});
    offset += b.data.size() * 4;
  }
  nlohmann::json header{
      {"format_version", kFormatVersion},
      {"config", nlohmann::json::parse(config.to_json())},
      {"vocabulary", nlohmann::json::parse(vocabulary.to_json())},
      {"blocks", dir},
      {"metadata", {{"epoch", epoch}, {"best_val_loss", best_val_loss}}}};
  std::string header_text = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot open for writing: " + path);
  os.write(kMagic, 4);
  write_u64_le(os, header_text.size());
  os.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const Block& b : blocks) write_f32_le(os, b.data);
  if (!os) throw CheckpointError("write failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError("bad magic in " + path);
  std::uint64_t header_len = read_u64_le(is);
  std::string header_text(header_len, '\0');
  is.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!is) throw CheckpointError("truncated header in " + path);

  nlohmann::json header = nlohmann::json::parse(header_text);
  if (header.at("format_version").get<int>() != kFormatVersion)
    throw CheckpointError("unsupported format version");

  Checkpoint ckpt;
  ckpt.config = ModelConfig::from_json(header.at("config").dump());
  ckpt.vocabulary = data::Vocabulary::from_json(header.at("vocabulary").dump());
  header.at("metadata").at("epoch").get_to(ckpt.epoch);
  header.at("metadata").at("best_val_loss").get_to(ckpt.best_val_loss);

  for (const auto& entry : header.at("blocks")) {
    Block b;
    entry.at("name").get_to(b.name);
    entry.at("shape").get_to(b.shape);
    std::uint64_t count = 1;
    for (int d : b.shape) count *= static_cast<std::uint64_t>(d);
    b.data.resize(count);
    ckpt.blocks.push_back(std::move(b));
  }
  // Blocks are laid out back to back in directory order; offsets are
  // validated rather than seeked to.
  std::uint64_t offset = 0;
  std::size_t i = 0;
  for (const auto& entry : header.at("blocks")) {
    if (entry.at("offset").get<std::uint64_t>() != offset)
      throw CheckpointError("non-contiguous block directory");
    read_f32_le(is, ckpt.blocks[i].data);
    offset += ckpt.blocks[i].data.size() * 4;
    ++i;
  }
  if (!is) throw CheckpointError("truncated parameter data in " + path);
  return ckpt;
}

}  // namespace cdn::model
