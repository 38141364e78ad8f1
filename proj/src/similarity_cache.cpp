#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tacf/format.hpp"
#include "tacf/similarity.hpp"

namespace tacf {

namespace {

constexpr std::array<char, 8> kMagic{'T', 'A', 'C', 'F', 'S', 'I', 'M', '\0'};

class Writer {
 public:
  void bytes(const char* data, std::size_t n) { out_.append(data, n); }

  template <typename T>
  void le(T value) {
    std::uint64_t bits = 0;
    if constexpr (std::is_floating_point_v<T>) {
      bits = std::bit_cast<std::uint64_t>(value);
    } else {
      bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t k = 0; k < sizeof(T); ++k) out_.push_back(static_cast<char>((bits >> (8 * k)) & 0xffu));
  }

  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  void bytes(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }

  template <typename T>
  T le() {
    need(sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + k])) << (8 * k);
    }
    pos_ += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
      return std::bit_cast<double>(bits);
    } else {
      return static_cast<T>(bits);
    }
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw std::runtime_error("similarity cache is truncated");
  }

  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t train_set_hash(const TrainSet& train) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t value) {
    for (int k = 0; k < 8; ++k) {
      h ^= (value >> (8 * k)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  mix(train.item_count);
  mix(train.profiles.size());
  for (const auto& profile : train.profiles) {
    mix(profile.size());
    for (const auto& r : profile) {
      mix(r.item);
      mix(static_cast<std::uint64_t>(r.time));
    }
  }
  return h;
}

void save_similarity(const std::string& path, const SimilarityModel& model, std::uint64_t dataset_hash) {
  Writer w;
  w.bytes(kMagic.data(), kMagic.size());
  w.le<std::uint32_t>(kSimilarityCacheVersion);
  w.le<std::uint64_t>(dataset_hash);
  w.le<std::uint64_t>(model.item_count());
  for (ItemIndex i = 0; i < model.item_count(); ++i) {
    const auto row = model.row(i);
    w.le<std::uint32_t>(i);
    w.le<std::uint32_t>(model.user_count(i));
    w.le<std::uint32_t>(static_cast<std::uint32_t>(row.size()));
    for (const auto& e : row) {
      w.le<std::uint32_t>(e.item);
      w.le<double>(e.value);
    }
  }
  write_file_atomic(path, w.str());
}

SimilarityModel load_similarity(const std::string& path, std::uint64_t expected_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open similarity cache '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Reader r(buffer.str());

  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw std::runtime_error("'" + path + "' is not a similarity cache");
  const auto version = r.le<std::uint32_t>();
  if (version != kSimilarityCacheVersion) {
    throw std::runtime_error("unsupported similarity cache version " + std::to_string(version));
  }
  const auto hash = r.le<std::uint64_t>();
  if (hash != expected_hash) {
    throw CacheMismatch("similarity cache '" + path + "' was built from different data");
  }
  const auto items = r.le<std::uint64_t>();
  std::vector<std::vector<SimilarityEntry>> rows(items);
  std::vector<std::uint32_t> counts(items);
  for (std::uint64_t i = 0; i < items; ++i) {
    const auto index = r.le<std::uint32_t>();
    if (index != i) throw std::runtime_error("similarity cache rows out of order");
    counts[i] = r.le<std::uint32_t>();
    const auto n = r.le<std::uint32_t>();
    auto& row = rows[i];
    row.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) {
      const auto j = r.le<std::uint32_t>();
      const auto value = r.le<double>();
      if (j >= items) throw std::runtime_error("similarity cache entry out of range");
      row.push_back({j, value});
    }
  }
  if (!r.done()) throw std::runtime_error("trailing bytes in similarity cache");
  return SimilarityModel(std::move(rows), std::move(counts));
}

}  // namespace tacf
