#include "xyzmap/image_io.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace xyzmap {

namespace {

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& header, const char* payload,
                std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload, static_cast<std::streamsize>(size));
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

/// Netpbm-style header tokenizer: whitespace separated, '#' comments.
class HeaderReader {
 public:
  HeaderReader(const std::vector<char>& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  std::string token() {
    skip_space();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      out.push_back(bytes_[pos_++]);
    }
    if (out.empty()) fail(ErrorCode::kMalformedHeader, path_.string() + ": header ended early");
    return out;
  }

  long integer() {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const long v = std::stol(t, &used);
      if (used != t.size() || v <= 0) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::kMalformedHeader, path_.string() + ": bad header field '" + t + "'");
    }
  }

  double real() {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::kMalformedHeader, path_.string() + ": bad scale '" + t + "'");
    }
  }

  /// The single whitespace byte separating header and payload.
  std::size_t payload_start() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail(ErrorCode::kMalformedHeader, path_.string() + ": missing header terminator");
    }
    return pos_ + 1;
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<char>& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

PfmImage read_pfm_raw(const std::filesystem::path& path) {
  const std::vector<char> bytes = read_file(path);
  HeaderReader header(bytes, path);
  const std::string magic = header.token();
  PfmImage img;
  if (magic == "Pf") {
    img.channels = 1;
  } else if (magic == "PF") {
    img.channels = 3;
  } else {
    fail(ErrorCode::kMalformedHeader, path.string() + ": not a PFM file");
  }
  img.width = header.integer();
  img.height = header.integer();
  const double scale = header.real();
  if (scale == 0.0 || !std::isfinite(scale)) fail(ErrorCode::kMalformedHeader, path.string() + ": zero scale");
  const std::size_t start = header.payload_start();

  const std::size_t count = static_cast<std::size_t>(img.width * img.height * img.channels);
  if (bytes.size() - start < count * sizeof(float)) {
    fail(ErrorCode::kTruncatedPayload, path.string() + ": payload shorter than the header declares");
  }
  const bool file_little = scale < 0;
  const bool swap = file_little != (std::endian::native == std::endian::little);

  img.data.resize(count);
  const std::size_t row_floats = static_cast<std::size_t>(img.width * img.channels);
  for (Index file_row = 0; file_row < img.height; ++file_row) {
    const Index image_row = img.height - 1 - file_row;
    for (std::size_t i = 0; i < row_floats; ++i) {
      std::uint32_t word;
      std::memcpy(&word, bytes.data() + start + (file_row * row_floats + i) * 4, 4);
      if (swap) word = __builtin_bswap32(word);
      img.data[image_row * row_floats + i] = std::bit_cast<float>(word);
    }
  }
  return img;
}

void write_pfm_raw(const std::filesystem::path& path, const PfmImage& img) {
  const std::size_t row_floats = static_cast<std::size_t>(img.width * img.channels);
  if (img.data.size() != row_floats * static_cast<std::size_t>(img.height)) {
    fail(ErrorCode::kDimensionMismatch, "PFM payload size does not match its dimensions");
  }
  std::vector<std::uint32_t> words(img.data.size());
  for (Index file_row = 0; file_row < img.height; ++file_row) {
    const Index image_row = img.height - 1 - file_row;
    for (std::size_t i = 0; i < row_floats; ++i) {
      std::uint32_t word = std::bit_cast<std::uint32_t>(img.data[image_row * row_floats + i]);
      if constexpr (std::endian::native != std::endian::little) word = __builtin_bswap32(word);
      words[file_row * row_floats + i] = word;
    }
  }
  std::ostringstream header;
  header << (img.channels == 3 ? "PF" : "Pf") << '\n'
         << img.width << ' ' << img.height << '\n'
         << "-1.0\n";
  write_file(path, header.str(), reinterpret_cast<const char*>(words.data()), words.size() * 4);
}

std::filesystem::path validity_path(const std::filesystem::path& map_path) {
  std::filesystem::path out = map_path;
  out.replace_filename(map_path.stem().string() + "_valid.pgm");
  return out;
}

void write_pgm(const std::filesystem::path& path, const SegMask& mask) {
  std::vector<unsigned char> payload(static_cast<std::size_t>(mask.height() * mask.width()));
  for (Index r = 0; r < mask.height(); ++r) {
    for (Index c = 0; c < mask.width(); ++c) payload[r * mask.width() + c] = mask(r, c) ? 255 : 0;
  }
  std::ostringstream header;
  header << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  write_file(path, header.str(), reinterpret_cast<const char*>(payload.data()), payload.size());
}

SegMask read_pgm(const std::filesystem::path& path) {
  const std::vector<char> bytes = read_file(path);
  HeaderReader header(bytes, path);
  if (header.token() != "P5") fail(ErrorCode::kMalformedHeader, path.string() + ": not a binary PGM");
  const long width = header.integer();
  const long height = header.integer();
  if (header.integer() != 255) fail(ErrorCode::kMalformedHeader, path.string() + ": maxval must be 255");
  const std::size_t start = header.payload_start();
  const std::size_t count = static_cast<std::size_t>(width * height);
  if (bytes.size() - start < count) {
    fail(ErrorCode::kTruncatedPayload, path.string() + ": payload shorter than the header declares");
  }
  MaskArray values(height, width);
  for (long r = 0; r < height; ++r) {
    for (long c = 0; c < width; ++c) {
      values(r, c) = static_cast<unsigned char>(bytes[start + r * width + c]) >= 128;
    }
  }
  return SegMask(std::move(values));
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out.precision(17);
  out << "# " << to_string(mesh.label) << '\n';
  out << "o " << to_string(mesh.label) << '\n';
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace xyzmap
