#include "gfaccess/bundled.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>

namespace gfaccess {

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("GF_ACCESS_DATA"); env && *env) return env;
    return GFACCESS_DATA_DIR;
}

const std::vector<std::string>& table_systems() {
    static const std::vector<std::string> names{"S(2,5,25)", "S(2,5,41)", "S(2,4,25)", "S(2,4,28)",
                                                "S(2,4,37)", "S(2,3,25)", "S(2,3,33)", "S(2,3,39)"};
    return names;
}

std::filesystem::path resolve_system(const std::string& name_or_path) {
    static const std::regex pattern(R"(^\s*S?[(_]?\s*(\d+)\s*[,_]\s*(\d+)\s*[,_]\s*(\d+)\s*\)?\s*$)");
    std::smatch m;
    if (std::regex_match(name_or_path, m, pattern)) {
        const auto file = data_directory() / ("S_" + m[1].str() + "_" + m[2].str() + "_" + m[3].str() + ".txt");
        if (std::filesystem::exists(file)) return file;
        throw Error("no bundled codebook for " + name_or_path + " in " + data_directory().string());
    }
    if (std::filesystem::exists(name_or_path)) return name_or_path;
    throw Error("unknown system or missing file: " + name_or_path);
}

PatternCodebook load_system(const std::string& name_or_path) {
    const auto path = resolve_system(name_or_path);
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return load_codebook(in);
}

}  // namespace gfaccess
