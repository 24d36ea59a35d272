#pragma once

// Shared plumbing for the test suites: fixture paths, hex-codepoint decoding
// for the frozen unicode cases, scratch directories, and a tiny process
// runner used by the CLI tests. Deliberately self-contained — nothing here
// reuses library code whose behavior the tests are checking.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef BOWKIT_TEST_DATA_DIR
#error "BOWKIT_TEST_DATA_DIR must be defined by the build"
#endif

namespace testutil {

inline std::filesystem::path data_dir() {
    return std::filesystem::path(BOWKIT_TEST_DATA_DIR);
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void spit(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

// Encodes one code point as UTF-8; independent of the library's encoder.
inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes "0063 0061 0074" (space-separated hex code points) into UTF-8.
inline std::string decode_cps(const std::string& field) {
    std::string out;
    std::istringstream in(field);
    std::string hex;
    while (in >> hex) append_utf8(out, static_cast<std::uint32_t>(std::stoul(hex, nullptr, 16)));
    return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

// Scratch directory removed on destruction; unique per instantiation.
class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static std::atomic<unsigned> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("bowkit_test_" + label + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs `exe args...` capturing stdout/stderr separately. Arguments are
// single-quoted for the shell; paths used by the tests contain no quotes.
inline RunResult run_process(const std::string& exe, const std::vector<std::string>& args,
                             const std::filesystem::path& scratch) {
    auto out_path = scratch / "cmd_stdout.txt";
    auto err_path = scratch / "cmd_stderr.txt";
    std::string cmd = "'" + exe + "'";
    for (const auto& a : args) {
        if (a.find('\'') != std::string::npos) throw std::runtime_error("argument contains quote: " + a);
        cmd += " '" + a + "'";
    }
    cmd += " > '" + out_path.string() + "' 2> '" + err_path.string() + "'";
    int status = std::system(cmd.c_str());
    RunResult r;
    if (status == -1) throw std::runtime_error("system() failed for: " + cmd);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return r;
}

}  // namespace testutil
