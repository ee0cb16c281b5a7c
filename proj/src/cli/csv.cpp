#include "qdgate/cli/csv.hpp"

#include <fstream>
#include <system_error>
#include <unistd.h>

#include "qdgate/cli/config.hpp"
#include "qdgate/error.hpp"

namespace qdgate::cli {

namespace {

std::string render_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

[[noreturn]] void io_failure(const std::string& message) {
  throw Error(ErrorCode::config_error, message);
}

}  // namespace

std::string CsvTable::render(std::uint64_t config_hash) const {
  std::string s = "# config_hash=" + hex64(config_hash) + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + render_cell(row[i]);
    s += "\n";
  }
  return s;
}

void write_atomically(const std::filesystem::path& out_dir, const std::vector<CsvTable>& tables,
                      std::uint64_t config_hash) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    io_failure("cannot create output directory '" + out_dir.string() + "'");
  }
  const fs::path staging =
      out_dir / (".qdsim-staging-" + std::to_string(::getpid()) + "-" + hex64(config_hash));
  fs::remove_all(staging, ec);
  if (!fs::create_directory(staging, ec) || ec) {
    io_failure("cannot create staging directory in '" + out_dir.string() + "'");
  }
  try {
    for (const auto& t : tables) {
      std::ofstream out(staging / t.name, std::ios::binary);
      out << t.render(config_hash);
      out.flush();
      if (!out) io_failure("cannot write '" + t.name + "'");
    }
    // Same filesystem, so each rename is atomic.
    for (const auto& t : tables) {
      fs::rename(staging / t.name, out_dir / t.name, ec);
      if (ec) io_failure("cannot move '" + t.name + "' into '" + out_dir.string() + "'");
    }
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(staging, ec);
}

}  // namespace qdgate::cli
