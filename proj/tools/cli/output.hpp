#ifndef DARBOUX_CLI_OUTPUT_HPP
#define DARBOUX_CLI_OUTPUT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "darboux/numerics.hpp"

namespace darboux::cli {

/// Shortest text that parses back to the same double.
std::string format_number(double v);

struct FileEntry {
    std::string name;
    Index rows = 0;
    std::string sha256;
};

/// Columns of equal length; a NaN cell is written as an empty field.
struct Table {
    std::vector<std::string> header;
    std::vector<Eigen::VectorXd> columns;
};

/// Table of a sampled function, excluded samples left empty.
Table two_columns(const std::string& x_name, const std::string& y_name, const SampledFunction& f);

/// Collects the files written by a command, in order.
class OutputDirectory {
public:
    explicit OutputDirectory(std::filesystem::path dir);

    /// Header row, LF endings, comma separated.
    void write_csv(const std::string& name, const Table& t);
    void write_json(const std::string& name, const Json& j);

    const std::vector<FileEntry>& manifest() const noexcept { return files_; }
    const std::filesystem::path& path() const noexcept { return dir_; }

private:
    void write(const std::string& name, const std::string& bytes, Index rows);

    std::filesystem::path dir_;
    std::vector<FileEntry> files_;
};

std::string sha256_hex(const std::string& bytes);

}  // namespace darboux::cli

#endif  // DARBOUX_CLI_OUTPUT_HPP
