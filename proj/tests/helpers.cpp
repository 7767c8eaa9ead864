#include "helpers.hpp"

#include <nlohmann/json.hpp>

#include "tlmt/util.hpp"

namespace tlmt::testing {

std::string corpus_config(const std::string& name) {
    return read_file(std::string(TLMT_SOURCE_DIR) + "/configs/" + name + ".json");
}

std::string corpus_formula(const std::string& name) {
    auto j = nlohmann::json::parse(corpus_config(name));
    return j.at("formula").get<std::string>();
}

}  // namespace tlmt::testing
