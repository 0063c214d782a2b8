#include "cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <openssl/evp.h>

namespace darboux::cli {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // drops the sign of -0
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

Table two_columns(const std::string& x_name, const std::string& y_name, const SampledFunction& f) {
    Eigen::VectorXd y = f.values();
    for (Index i = 0; i < y.size(); ++i)
        if (f.excluded(i)) y[i] = std::numeric_limits<double>::quiet_NaN();
    return {{x_name, y_name}, {f.grid().points(), std::move(y)}};
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xf];
    }
    return out;
}

OutputDirectory::OutputDirectory(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

void OutputDirectory::write_csv(const std::string& name, const Table& t) {
    if (t.header.size() != t.columns.size()) throw std::logic_error("CSV header and columns disagree");
    const Index rows = t.columns.empty() ? 0 : t.columns.front().size();
    std::string s;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c) s += ',';
        s += t.header[c];
    }
    s += '\n';
    for (Index r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            if (c) s += ',';
            const double v = t.columns[c][r];
            if (!std::isnan(v)) s += format_number(v);
        }
        s += '\n';
    }
    write(name, s, rows);
}

void OutputDirectory::write_json(const std::string& name, const Json& j) {
    write(name, j.dump(2) + "\n", 0);
}

void OutputDirectory::write(const std::string& name, const std::string& bytes, Index rows) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.push_back({name, rows, sha256_hex(bytes)});
}

}  // namespace darboux::cli
