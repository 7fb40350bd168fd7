#include "csilab/dataset.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <thread>

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>

namespace csilab::dataset {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace fs = std::filesystem;

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError(what + ": truncated header");
  return v;
}

void write_matrix(std::ostream& out, const CMatrix& m) {
  // Row-major interleaved (re, im).
  std::vector<float> buf(static_cast<std::size_t>(m.size()) * 2);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      buf[k++] = m(r, c).real();
      buf[k++] = m(r, c).imag();
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

CMatrix read_matrix_at(std::istream& in, std::uint32_t rows, std::uint32_t cols, const std::string& what) {
  std::vector<float> buf(std::size_t{rows} * cols * 2);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) throw IoError(what + ": truncated sample data");
  CMatrix m(rows, cols);
  std::size_t k = 0;
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      m(r, c) = {buf[k], buf[k + 1]};
      k += 2;
    }
  }
  return m;
}

}  // namespace

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

fs::path split_path(const fs::path& dir, Split s) { return dir / (split_name(s) + ".csids"); }

Header read_header(std::istream& in, const std::string& what) {
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0) throw IoError(what + ": not a CSIDS1 container");
  const auto version = get<std::uint16_t>(in, what);
  if (version != kVersion) throw IoError(what + ": unsupported container version " + std::to_string(version));
  Header h;
  h.n_antennas = get<std::uint32_t>(in, what);
  h.n_subcarriers = get<std::uint32_t>(in, what);
  const auto n_freqs = get<std::uint32_t>(in, what);
  if (n_freqs == 0 || n_freqs > 1024) throw IoError(what + ": implausible frequency count");
  for (std::uint32_t i = 0; i < n_freqs; ++i) h.frequencies_hz.push_back(get<double>(in, what));
  h.n_samples = get<std::uint64_t>(in, what);
  h.snr_db = get<double>(in, what);
  h.master_seed = get<std::uint64_t>(in, what);
  return h;
}

Writer::Writer(const fs::path& path, const Header& header) : path_(path), header_(header) {
  out_.open(fs::path(path_.string() + ".tmp"), std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError(path_.string() + ": cannot open for writing");
  out_.write(kMagic, 6);
  put<std::uint16_t>(out_, kVersion);
  put<std::uint32_t>(out_, header_.n_antennas);
  put<std::uint32_t>(out_, header_.n_subcarriers);
  put<std::uint32_t>(out_, static_cast<std::uint32_t>(header_.frequencies_hz.size()));
  for (double f : header_.frequencies_hz) put<double>(out_, f);
  put<std::uint64_t>(out_, header_.n_samples);
  put<double>(out_, header_.snr_db);
  put<std::uint64_t>(out_, header_.master_seed);
}

void Writer::write(const channel::ChannelSample& s) {
  if (s.h_dl.size() != header_.n_dl() || s.y_dl.size() != header_.n_dl())
    throw ShapeError(path_.string() + ": sample DL count does not match header");
  auto check = [&](const CMatrix& m) {
    if (m.rows() != header_.n_antennas || m.cols() != header_.n_subcarriers)
      throw ShapeError(path_.string() + ": sample matrix shape does not match header");
    write_matrix(out_, m);
  };
  check(s.h_ul);
  check(s.y_ul);
  for (std::size_t g = 0; g < s.h_dl.size(); ++g) {
    check(s.h_dl[g]);
    check(s.y_dl[g]);
  }
  if (!out_) throw IoError(path_.string() + ": write failed");
  ++written_;
}

void Writer::close() {
  out_.close();
  if (!out_) throw IoError(path_.string() + ": write failed on close");
  if (written_ != header_.n_samples)
    throw IoError(path_.string() + ": wrote " + std::to_string(written_) + " samples, header declares " +
                  std::to_string(header_.n_samples));
  std::error_code ec;
  fs::rename(path_.string() + ".tmp", path_, ec);
  if (ec) throw IoError(path_.string() + ": rename failed: " + ec.message());
}

Reader::Reader(const fs::path& path) : path_(path) {
  in_.open(path_, std::ios::binary);
  if (!in_) throw IoError(path_.string() + ": cannot open for reading");
  header_ = read_header(in_, path_.string());
  data_offset_ = static_cast<std::uint64_t>(in_.tellg());
  const auto expected = data_offset_ + header_.n_samples * header_.sample_bytes();
  if (fs::file_size(path_) != expected) throw IoError(path_.string() + ": file size does not match header");
}

CMatrix Reader::read_matrix(std::size_t index, std::size_t slot) {
  if (index >= header_.n_samples) throw Error(path_.string() + ": sample index out of range");
  if (slot >= header_.matrices_per_sample()) throw Error(path_.string() + ": matrix slot out of range");
  in_.clear();
  in_.seekg(static_cast<std::streamoff>(data_offset_ + index * header_.sample_bytes() +
                                        slot * header_.matrix_bytes()));
  return read_matrix_at(in_, header_.n_antennas, header_.n_subcarriers, path_.string());
}

channel::ChannelSample Reader::read(std::size_t index) {
  channel::ChannelSample s;
  s.h_ul = read_matrix(index, 0);
  s.y_ul = read_matrix_at(in_, header_.n_antennas, header_.n_subcarriers, path_.string());
  for (std::size_t g = 0; g < header_.n_dl(); ++g) {
    s.h_dl.push_back(read_matrix_at(in_, header_.n_antennas, header_.n_subcarriers, path_.string()));
    s.y_dl.push_back(read_matrix_at(in_, header_.n_antennas, header_.n_subcarriers, path_.string()));
  }
  s.seed = 0;
  return s;
}

UlNoisyView UlNoisyView::load(const fs::path& split_file) {
  Reader reader(split_file);
  std::vector<CMatrix> y;
  y.reserve(reader.size());
  for (std::size_t i = 0; i < reader.size(); ++i) y.push_back(reader.read_matrix(i, 1));
  return UlNoisyView(std::move(y));
}

std::string FrequencySelector::label() const { return dl_index < 0 ? "UL" : "DL" + std::to_string(dl_index); }

EvalPairs load_pairs(const fs::path& split_file, FrequencySelector freq) {
  Reader reader(split_file);
  if (freq.dl_index >= static_cast<int>(reader.header().n_dl()))
    throw Error(split_file.string() + ": DL index " + std::to_string(freq.dl_index) + " not present");
  const std::size_t slot = freq.dl_index < 0 ? 0 : 2 + 2 * static_cast<std::size_t>(freq.dl_index);
  EvalPairs pairs;
  for (std::size_t i = 0; i < reader.size(); ++i) {
    pairs.truth.push_back(reader.read_matrix(i, slot));
    pairs.noisy.push_back(reader.read_matrix(i, slot + 1));
  }
  return pairs;
}

std::uint32_t file_crc32(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for checksum");
  boost::crc_32_type crc;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    crc.process_bytes(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return crc.checksum();
}

void generate_dataset(const channel::ScenarioConfig& scenario, const SplitSizes& sizes, double snr_db,
                      std::uint64_t master_seed, const fs::path& dir) {
  scenario.validate();
  if (sizes.train == 0 || sizes.val == 0 || sizes.test == 0) throw Error("generate_dataset: split sizes must be > 0");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());

  Header header;
  header.n_antennas = static_cast<std::uint32_t>(scenario.n_antennas());
  header.n_subcarriers = static_cast<std::uint32_t>(scenario.n_subcarriers);
  header.frequencies_hz = scenario.center_frequencies();
  header.snr_db = snr_db;
  header.master_seed = master_seed;

  const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
  constexpr std::size_t kBlock = 256;

  nlohmann::json manifest;
  manifest["scenario"] = scenario;
  manifest["snr_db"] = snr_db;
  manifest["master_seed"] = master_seed;

  std::uint64_t offset = 0;
  const std::pair<Split, std::uint64_t> splits[] = {
      {Split::kTrain, sizes.train}, {Split::kVal, sizes.val}, {Split::kTest, sizes.test}};
  for (const auto& [split, count] : splits) {
    header.n_samples = count;
    const fs::path path = split_path(dir, split);
    Writer writer(path, header);
    std::vector<channel::ChannelSample> block;
    for (std::uint64_t start = 0; start < count; start += kBlock) {
      const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, count - start));
      block.assign(n, {});
      auto work = [&](unsigned t) {
        for (std::size_t i = t; i < n; i += n_threads)
          block[i] = channel::generate_sample(scenario, snr_db, master_seed, offset + start + i);
      };
      if (n_threads == 1) {
        work(0);
      } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
      }
      for (const auto& s : block) writer.write(s);
    }
    writer.close();
    offset += count;
    manifest["splits"][split_name(split)] = {{"file", path.filename().string()},
                                             {"n_samples", count},
                                             {"crc32", file_crc32(path)}};
  }

  const fs::path manifest_path = dir / "dataset.json";
  {
    std::ofstream out(manifest_path.string() + ".tmp", std::ios::trunc);
    if (!out) throw IoError(manifest_path.string() + ": cannot open for writing");
    out << manifest.dump(2) << "\n";
  }
  fs::rename(manifest_path.string() + ".tmp", manifest_path, ec);
  if (ec) throw IoError(manifest_path.string() + ": rename failed: " + ec.message());
}

}  // namespace csilab::dataset
