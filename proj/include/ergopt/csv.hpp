#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergopt {

/// CSV writer with deterministic formatting: doubles are printed with 17
/// significant digits so artifacts are byte-identical across runs.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
        for (size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    static std::string fmt(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    static std::string fmt(long long v) { return std::to_string(v); }
    static std::string fmt(int v) { return std::to_string(v); }
    static std::string fmt(const std::string& s) { return s; }

    template <class... Ts>
    void row(const Ts&... vals) {
        bool first = true;
        ((out_ << (first ? (first = false, "") : ",") << fmt(vals)), ...);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

} // namespace ergopt
