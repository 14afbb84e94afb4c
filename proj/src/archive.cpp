#include "scenegen/archive.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <zlib.h>

#include "scenegen/error.hpp"

namespace scenegen {
namespace fs = std::filesystem;

namespace {

std::uint32_t le32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}
std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

// window_bits: 16+MAX_WBITS for gzip, -MAX_WBITS for raw deflate.
std::string inflate_bytes(std::string_view in, int window_bits, std::size_t size_hint) {
  z_stream zs{};
  if (inflateInit2(&zs, window_bits) != Z_OK) throw ArchiveError("zlib init failed");
  std::string out;
  out.reserve(size_hint ? size_hint : in.size() * 4);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  std::vector<char> chunk(1 << 16);
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ArchiveError("corrupt compressed stream");
    }
    out.append(chunk.data(), chunk.size() - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw ArchiveError("truncated compressed stream");
    }
  } while (rc != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

fs::path safe_join(const fs::path& dest, std::string name) {
  while (!name.empty() && name.front() == '.' && name.size() > 1 && name[1] == '/') name.erase(0, 2);
  fs::path rel = fs::path(name).lexically_normal();
  if (rel.is_absolute() || rel.empty()) throw ArchiveError("illegal archive entry path: " + name);
  for (const auto& part : rel) {
    if (part == "..") throw ArchiveError("archive entry escapes destination: " + name);
  }
  return dest / rel;
}

void write_entry(const fs::path& path, std::string_view data) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArchiveError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

std::uint64_t tar_octal(const char* field, std::size_t len) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    char c = field[i];
    if (c == '\0' || c == ' ') {
      if (v != 0) break;
      continue;
    }
    if (c < '0' || c > '7') throw ArchiveError("bad tar header number");
    v = v * 8 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

void untar(std::string_view tar, const fs::path& dest) {
  std::size_t pos = 0;
  std::string long_name;
  while (pos + 512 <= tar.size()) {
    const char* h = tar.data() + pos;
    bool zero_block = true;
    for (int i = 0; i < 512; ++i) {
      if (h[i] != 0) {
        zero_block = false;
        break;
      }
    }
    if (zero_block) return;
    std::string name(h, strnlen(h, 100));
    const std::string prefix(h + 345, strnlen(h + 345, 155));
    if (std::memcmp(h + 257, "ustar", 5) == 0 && !prefix.empty()) name = prefix + "/" + name;
    const std::uint64_t size = tar_octal(h + 124, 12);
    const char type = h[156];
    pos += 512;
    if (pos + size > tar.size()) throw ArchiveError("truncated tar archive");
    std::string_view data = tar.substr(pos, size);
    pos += (size + 511) / 512 * 512;

    if (!long_name.empty()) {
      name = long_name;
      long_name.clear();
    }
    if (type == 'L') {  // GNU long name for the next entry
      long_name.assign(data.data(), strnlen(data.data(), data.size()));
      continue;
    }
    if (type == 'x' || type == 'g') continue;  // pax headers
    if (type == '5') {
      fs::create_directories(safe_join(dest, name));
    } else if (type == '0' || type == '\0' || type == '7') {
      write_entry(safe_join(dest, name), data);
    }
    // links and devices are skipped
  }
  throw ArchiveError("truncated tar archive");
}

void unzip(std::string_view zip, const fs::path& dest) {
  const auto* base = reinterpret_cast<const unsigned char*>(zip.data());
  // End-of-central-directory record is within the last 64 KiB + 22 bytes.
  if (zip.size() < 22) throw ArchiveError("truncated zip archive");
  std::size_t eocd = std::string_view::npos;
  const std::size_t lowest = zip.size() > 65557 ? zip.size() - 65557 : 0;
  for (std::size_t i = zip.size() - 22 + 1; i-- > lowest;) {
    if (le32(base + i) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw ArchiveError("zip end-of-directory record not found");
  const std::uint16_t count = le16(base + eocd + 10);
  std::size_t cd = le32(base + eocd + 16);
  for (std::uint16_t n = 0; n < count; ++n) {
    if (cd + 46 > zip.size() || le32(base + cd) != 0x02014b50) {
      throw ArchiveError("corrupt zip central directory");
    }
    const std::uint16_t method = le16(base + cd + 10);
    const std::uint32_t crc = le32(base + cd + 16);
    const std::uint32_t csize = le32(base + cd + 20);
    const std::uint32_t usize = le32(base + cd + 24);
    const std::uint16_t name_len = le16(base + cd + 28);
    const std::uint16_t extra_len = le16(base + cd + 30);
    const std::uint16_t comment_len = le16(base + cd + 32);
    const std::uint32_t local = le32(base + cd + 42);
    if (cd + 46 + name_len > zip.size()) throw ArchiveError("corrupt zip central directory");
    std::string name(zip.substr(cd + 46, name_len));
    cd += 46 + name_len + extra_len + comment_len;

    if (local + 30 > zip.size() || le32(base + local) != 0x04034b50) {
      throw ArchiveError("corrupt zip local header for " + name);
    }
    const std::size_t data_off = local + 30 + le16(base + local + 26) + le16(base + local + 28);
    if (data_off + csize > zip.size()) throw ArchiveError("truncated zip entry " + name);
    std::string_view raw = zip.substr(data_off, csize);

    if (!name.empty() && name.back() == '/') {
      fs::create_directories(safe_join(dest, name));
      continue;
    }
    std::string data;
    if (method == 0) {
      data.assign(raw);
    } else if (method == 8) {
      data = inflate_bytes(raw, -MAX_WBITS, usize);
    } else {
      throw ArchiveError("unsupported zip compression method " + std::to_string(method));
    }
    if (data.size() != usize) throw ArchiveError("zip entry size mismatch for " + name);
    const auto actual = static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
    if (actual != crc) throw ArchiveError("zip checksum mismatch for " + name);
    write_entry(safe_join(dest, name), data);
  }
}

}  // namespace

ArchiveFormat detect_archive_format(std::string_view bytes) {
  if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
      static_cast<unsigned char>(bytes[1]) == 0x8b) {
    return ArchiveFormat::TarGz;
  }
  if (bytes.size() >= 4 && bytes.substr(0, 4) == std::string_view("PK\x03\x04", 4)) {
    return ArchiveFormat::Zip;
  }
  return ArchiveFormat::Unknown;
}

void unpack_archive(std::string_view bytes, const fs::path& dest) {
  fs::create_directories(dest);
  switch (detect_archive_format(bytes)) {
    case ArchiveFormat::TarGz: untar(gzip_decompress(bytes), dest); return;
    case ArchiveFormat::Zip: unzip(bytes, dest); return;
    case ArchiveFormat::Unknown: break;
  }
  throw ArchiveError("unsupported archive format (expected zip or tar.gz)");
}

std::string gzip_compress(std::string_view bytes) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY) !=
      Z_OK) {
    throw ArchiveError("zlib init failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(bytes.size())) + 32, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw ArchiveError("gzip compression failed");
  out.resize(zs.total_out);
  return out;
}

std::string gzip_decompress(std::string_view bytes) { return inflate_bytes(bytes, 16 + MAX_WBITS, 0); }

}  // namespace scenegen
