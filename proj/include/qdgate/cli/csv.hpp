#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace qdgate::cli {

using Cell = std::variant<double, long long, std::string>;

struct CsvTable {
  std::string name;  // file name inside the output directory
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  // "# config_hash=<hex>", the header row, then one line per row.
  std::string render(std::uint64_t config_hash) const;
};

// Renders every table into a temporary directory next to out_dir, then renames the files into
// place. Nothing is left in out_dir if any write fails.
void write_atomically(const std::filesystem::path& out_dir, const std::vector<CsvTable>& tables,
                      std::uint64_t config_hash);

}  // namespace qdgate::cli
