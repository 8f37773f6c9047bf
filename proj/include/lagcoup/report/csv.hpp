#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace lagcoup {

// Small CSV emitter: header comment with the config hash and master seed, one
// header row, then data rows. Numbers use shortest round-trip formatting with
// a '.' decimal point, so identical runs produce byte-identical files.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::uint64_t config_hash, std::uint64_t master_seed,
              const std::vector<std::string>& columns)
        : os_(os) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof(buf), config_hash, 16);
        os_ << "# config=" << std::string(buf, res.ptr) << " seed=";
        res = std::to_chars(buf, buf + sizeof(buf), master_seed);
        os_ << std::string(buf, res.ptr) << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) os_ << ',';
            os_ << columns[i];
        }
        os_ << "\n";
        width_ = columns.size();
    }

    CsvWriter& field(double v) {
        sep();
        char buf[40];
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        os_.write(buf, res.ptr - buf);
        return *this;
    }

    CsvWriter& field(long v) {
        sep();
        os_ << v;
        return *this;
    }

    CsvWriter& field(int v) { return field(static_cast<long>(v)); }

    CsvWriter& field(const std::string& v) {
        sep();
        os_ << v;
        return *this;
    }

    void end_row() {
        os_ << "\n";
        col_ = 0;
    }

private:
    void sep() {
        if (col_) os_ << ',';
        ++col_;
    }

    std::ostream& os_;
    std::size_t width_ = 0;
    std::size_t col_ = 0;
};

// FNV-1a over the canonical config text; embedded in every output header.
inline std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace lagcoup
