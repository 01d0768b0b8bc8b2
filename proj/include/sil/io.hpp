#pragma once
// CSV and run-manifest output. All floating point is printed with %.17g so
// reruns are byte-identical; manifests record parameters, seed, threads and
// FNV-1a digests of the written outputs (reproducibility checks, not crypto).
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sil {

// shortest round-trip-safe decimal for a double
std::string fmt_g17(double x);

struct csv_writer {
    std::string header;
    std::vector<std::string> rows;
    void row(const std::string& r) { rows.push_back(r); }
    void write(const std::string& path) const;
};

uint64_t fnv1a64_file(const std::string& path);

struct manifest {
    std::string subcommand;
    std::string version;
    std::map<std::string, std::string> params;  // stringified flags, sorted by key
    std::vector<std::string> outputs;           // file paths written by the run
    void write(const std::string& path) const;  // json, includes output digests
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace sil
