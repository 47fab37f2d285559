#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tqn/data.hpp"
#include "tqn/pipeline.hpp"

namespace tqn {

/// Bad configuration key or value; maps to the usage exit code.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a `train` run needs, populated from key=value files and flags.
struct RunSettings {
    TrainConfig train;
    std::string data_path;
    std::optional<DataFormat> data_format;  // inferred from the extension when unset
    double holdout = 1.0 / 6.0;
    MetricSpec metric;
    std::string checkpoint = "model.tqnm";
    std::string curves = "curves.csv";
    std::string report = "report.txt";
};

struct ConfigKey {
    std::string_view key;   // e.g. "stage1.lr"
    std::string_view flag;  // e.g. "--stage1-lr"
    std::string_view help;
};

/// Every accepted key, in documentation order.
std::span<const ConfigKey> config_keys();

/// Sets one field. `where` names the source (file:line or flag) for error messages.
void apply_setting(RunSettings& s, std::string_view key, std::string_view value, const std::string& where);

/// Reads `key = value` lines; `#` starts a comment. Unknown keys are rejected.
void load_config_file(RunSettings& s, const std::filesystem::path& path);

/// Strict numeric parsers: the whole string must be consumed.
double parse_double(std::string_view text, const std::string& what);
std::uint64_t parse_u64(std::string_view text, const std::string& what);
std::uint32_t parse_u32(std::string_view text, const std::string& what);

}  // namespace tqn
