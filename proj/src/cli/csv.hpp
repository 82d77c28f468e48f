#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace swipt::cli {

/// CSV writer with a fixed header, 9-significant-digit numbers and an
/// atomic rename on close so partially written files never appear under
/// their final name.
class CsvWriter {
public:
    CsvWriter(std::filesystem::path path, std::vector<std::string> columns)
        : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_) throw std::runtime_error("cannot write " + tmp_.string());
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
        n_columns_ = columns.size();
    }

    ~CsvWriter() {
        if (out_.is_open()) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    void cell(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        sep();
        out_ << buf;
    }
    void cell(long long v) { sep(); out_ << v; }
    void cell(int v) { sep(); out_ << v; }
    void cell(const std::string& v) { sep(); out_ << v; }
    void empty_cell() { sep(); }

    void end_row() {
        out_ << "\n";
        col_ = 0;
    }

    void close() {
        out_.close();
        if (!out_.good())
            throw std::runtime_error("I/O error writing " + tmp_.string());
        std::filesystem::rename(tmp_, path_);
    }

private:
    void sep() {
        if (col_++) out_ << ",";
    }
    std::filesystem::path path_, tmp_;
    std::ofstream out_;
    std::size_t n_columns_ = 0;
    std::size_t col_ = 0;
};

} // namespace swipt::cli
