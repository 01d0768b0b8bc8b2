#include "sil/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sil/util.hpp"

namespace sil {

std::string fmt_g17(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parameter_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw parameter_error("write failed: " + path);
}

void csv_writer::write(const std::string& path) const {
    std::ostringstream ss;
    ss << header << "\n";
    for (const auto& r : rows) ss << r << "\n";
    write_text_file(path, ss.str());
}

uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parameter_error("cannot open for digest: " + path);
    uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= (unsigned char)buf[i];
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

void manifest::write(const std::string& path) const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["version"] = version;
    nlohmann::ordered_json p;
    for (const auto& [k, v] : params) p[k] = v;  // std::map keeps keys sorted
    j["params"] = p;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& f : outputs) {
        char dig[24];
        std::snprintf(dig, sizeof dig, "%016llx", (unsigned long long)fnv1a64_file(f));
        outs.push_back({{"file", f}, {"fnv1a64", dig}});
    }
    j["outputs"] = outs;
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace sil
