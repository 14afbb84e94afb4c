#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace scenegen {

enum class ArchiveFormat { TarGz, Zip, Unknown };

ArchiveFormat detect_archive_format(std::string_view bytes);

/// Unpacks a zip or tar.gz archive into dest (created if missing). Entry paths
/// that are absolute or climb out of dest are rejected.
void unpack_archive(std::string_view bytes, const std::filesystem::path& dest);

/// gzip-compresses `bytes` (used to build tar.gz fixtures and caches).
std::string gzip_compress(std::string_view bytes);
std::string gzip_decompress(std::string_view bytes);

}  // namespace scenegen
