#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vexp {

// All numeric CSV output goes through one snprintf-based formatter so files
// are byte-identical across runs, locales, and iostream state.
inline std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Comma-separated output with a '#'-prefixed metadata block before the
// header: resolved configuration, master seed, artifact version.  Metadata
// must never include anything scheduling-dependent (worker counts, wall
// time); the byte-identity contract covers the whole file.
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void meta(std::string_view key, std::string_view value) {
        os_ << "# " << key << "=" << value << "\n";
    }
    void meta(std::string_view key, const char* value) { meta(key, std::string_view(value)); }
    void meta(std::string_view key, double value) { meta(key, std::string_view(fmt_g12(value))); }
    void meta(std::string_view key, int value) { meta(key, std::to_string(value)); }
    void meta(std::string_view key, std::uint64_t value) { meta(key, std::to_string(value)); }

    void header(std::span<const std::string> cols) { line(cols); }
    void row(std::span<const std::string> cells) { line(cells); }
    void row(std::span<const double> cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (const double v : cells) s.push_back(fmt_g12(v));
        line(s);
    }

  private:
    void line(std::span<const std::string> cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << "\n";
    }
    std::ostream& os_;
};

} // namespace vexp
