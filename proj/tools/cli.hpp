#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "livseg/features.hpp"
#include "livseg/phantom.hpp"
#include "livseg/watershed.hpp"

namespace livseg::cli {

/// Exit statuses shared by every subcommand.
enum ExitCode : int { kOk = 0, kInputError = 2, kPipelineError = 3 };

struct CliConfig {
    PipelineConfig pipeline;
    PhantomConfig phantom;
    WaveletKind wavelet = WaveletKind::Haar;
    int levels = 2;
};

/// Applies the keys present in `j` on top of `cfg`. Unknown keys are
/// rejected so typos do not silently fall back to defaults.
void apply_config_json(const nlohmann::json& j, CliConfig& cfg);

nlohmann::json config_to_json(const CliConfig& cfg);

PhantomConfig phantom_from_json(const nlohmann::json& j, const PhantomConfig& base);
nlohmann::json phantom_to_json(const PhantomConfig& cfg);

nlohmann::json feature_json(const FeatureVector& fv, int label);
nlohmann::json report_json(const EvaluationReport& report);

/// Reads a batch file: an array of phantom objects, {"phantoms": [...]}, or
/// {"default_batch": {"count", "contrast", "sigma", "base_seed"}}.
std::vector<PhantomConfig> load_batch(const nlohmann::json& j, const PhantomConfig& base);

/// Entry point behind the `livseg` executable; `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace livseg::cli
