#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>

#include <CLI11.hpp>

#include "livseg/enhance.hpp"
#include "livseg/pnm.hpp"

namespace livseg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string connectivity_name(Connectivity c) { return c == Connectivity::Four ? "4" : "8"; }

Connectivity parse_connectivity(int v)
{
    if (v == 4) {
        return Connectivity::Four;
    }
    if (v == 8) {
        return Connectivity::Eight;
    }
    throw InputError("connectivity must be 4 or 8");
}

std::string wavelet_name(WaveletKind k) { return k == WaveletKind::Haar ? "haar" : "db4"; }

WaveletKind parse_wavelet(const std::string& s)
{
    if (s == "haar") {
        return WaveletKind::Haar;
    }
    if (s == "db4") {
        return WaveletKind::Daubechies4;
    }
    throw InputError("wavelet must be haar or db4, got " + s);
}

std::string policy_name(TumorPolicy p)
{
    return p == TumorPolicy::LargestInterior ? "largest_interior" : "max_mean_contrast";
}

TumorPolicy parse_policy(const std::string& s)
{
    if (s == "largest_interior") {
        return TumorPolicy::LargestInterior;
    }
    if (s == "max_mean_contrast") {
        return TumorPolicy::MaxMeanContrast;
    }
    throw InputError("tumor_policy must be largest_interior or max_mean_contrast, got " + s);
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where)
{
    if (!j.is_object()) {
        throw InputError(where + " must be a JSON object");
    }
    for (const auto& item : j.items()) {
        if (!known.contains(item.key())) {
            throw InputError("unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

Ellipse ellipse_from_json(const json& j, Ellipse e, const std::string& where)
{
    reject_unknown(j, {"cx", "cy", "semi_x", "semi_y", "angle", "mean"}, where);
    e.cx = j.value("cx", e.cx);
    e.cy = j.value("cy", e.cy);
    e.semi_x = j.value("semi_x", e.semi_x);
    e.semi_y = j.value("semi_y", e.semi_y);
    e.angle = j.value("angle", e.angle);
    return e;
}

json ellipse_to_json(const Ellipse& e)
{
    return json{{"cx", e.cx}, {"cy", e.cy}, {"semi_x", e.semi_x}, {"semi_y", e.semi_y},
                {"angle", e.angle}};
}

const std::set<std::string> kPhantomKeys{"width",           "height", "organ", "organ_mean",
                                         "background_mean", "tumors", "sigma", "seed"};

json read_json_file(const fs::path& path)
{
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file(path);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Overrides {
    std::optional<std::string> config;
    std::optional<int> se_radius;
    std::optional<int> connectivity;
    std::optional<int> min_marker_area;
    std::optional<int> fg_shrink_radius;
    std::optional<std::string> tumor_policy;
    std::optional<std::string> wavelet;
    std::optional<int> levels;
    std::optional<std::uint64_t> seed;
    std::optional<double> sigma;
    std::string out;
};

void add_shared_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "JSON config file; flags override its values");
    cmd->add_option("--se-radius", o.se_radius, "Disk radius for opening/closing by reconstruction");
    cmd->add_option("--connectivity", o.connectivity, "Pixel connectivity (4 or 8)");
    cmd->add_option("--min-marker-area", o.min_marker_area,
                    "Smallest foreground marker kept, in pixels");
    cmd->add_option("--fg-shrink-radius", o.fg_shrink_radius,
                    "Erosion radius applied to foreground markers");
    cmd->add_option("--tumor-policy", o.tumor_policy,
                    "Tumor region choice: max_mean_contrast or largest_interior");
    cmd->add_option("--wavelet", o.wavelet, "Wavelet family: haar or db4");
    cmd->add_option("--levels", o.levels, "Wavelet decomposition levels");
    cmd->add_option("--seed", o.seed, "Phantom noise seed");
}

CliConfig resolve(const Overrides& o)
{
    CliConfig cfg;
    if (o.config) {
        apply_config_json(read_json_file(*o.config), cfg);
    }
    if (o.se_radius) {
        cfg.pipeline.se_radius = *o.se_radius;
    }
    if (o.connectivity) {
        cfg.pipeline.connectivity = parse_connectivity(*o.connectivity);
    }
    if (o.min_marker_area) {
        cfg.pipeline.min_marker_area = *o.min_marker_area;
    }
    if (o.fg_shrink_radius) {
        cfg.pipeline.fg_shrink_radius = *o.fg_shrink_radius;
    }
    if (o.tumor_policy) {
        cfg.pipeline.tumor_policy = parse_policy(*o.tumor_policy);
    }
    if (o.wavelet) {
        cfg.wavelet = parse_wavelet(*o.wavelet);
    }
    if (o.levels) {
        cfg.levels = *o.levels;
    }
    if (o.seed) {
        cfg.phantom.seed = *o.seed;
    }
    if (o.sigma) {
        cfg.phantom.noise_sigma = *o.sigma;
    }
    try {
        cfg.pipeline.validate();
    } catch (const PreconditionError& e) {
        throw InputError(e.what());
    }
    if (cfg.levels < 1) {
        throw InputError("levels must be >= 1");
    }
    return cfg;
}

void write_stage(const fs::path& dir, const Stage& stage)
{
    if (const auto* gray = std::get_if<GrayImage8>(&stage.image)) {
        write_file_atomic(dir / (stage.name + ".pgm"), write_pgm(*gray));
    } else {
        write_file_atomic(dir / (stage.name + ".ppm"), write_ppm(std::get<RgbImage>(stage.image)));
    }
}

int cmd_segment(const std::string& input, const CliConfig& cfg, const fs::path& out_dir,
                std::ostream& out)
{
    GrayImage8 img;
    try {
        img = load_pgm(input);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }

    SegmentationResult seg;
    try {
        seg = segment(img, cfg.pipeline);
    } catch (const PreconditionError& e) {
        throw InputError(e.what());
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw InputError("cannot create " + out_dir.string() + ": " + ec.message());
    }
    for (const auto& stage : seg.stages) {
        write_stage(out_dir, stage);
    }

    if (seg.tumor_label) {
        json features;
        try {
            const auto fv = extract_features(img, label_mask(seg.labels, *seg.tumor_label),
                                             cfg.wavelet, cfg.levels);
            features = feature_json(fv, *seg.tumor_label);
        } catch (const PreconditionError& e) {
            features = json{{"label", *seg.tumor_label}, {"error", e.what()}};
        }
        write_file_atomic(out_dir / "features.json", features.dump(2) + "\n");
    }

    json summary{{"width", img.width()},
                 {"height", img.height()},
                 {"regions", num_labels(seg.labels)},
                 {"tumor_label", seg.tumor_label ? json(*seg.tumor_label) : json(nullptr)},
                 {"degenerate", seg.degenerate},
                 {"fg_marker_pixels", count_foreground(seg.fg_markers)},
                 {"bg_marker_pixels", count_foreground(seg.bg_markers)},
                 {"ridge_pixels", count_foreground(seg.ridge)},
                 {"stages", json::array()},
                 {"config", config_to_json(cfg)}};
    for (const auto& stage : seg.stages) {
        summary["stages"].push_back(stage.name);
    }
    write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");

    out << "regions=" << num_labels(seg.labels) << " tumor_label="
        << (seg.tumor_label ? std::to_string(*seg.tumor_label) : std::string("none")) << "\n";
    return kOk;
}

int cmd_otsu(const std::string& input, std::ostream& out)
{
    GrayImage8 img;
    try {
        img = load_pgm(input);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    const auto r = otsu_threshold(histogram(img));
    out << "threshold=" << r.threshold << " variance=" << format_double(r.between_class_variance)
        << " degenerate=" << (r.degenerate ? "true" : "false") << "\n";
    return kOk;
}

int cmd_phantom(const CliConfig& cfg, const std::string& prefix, std::ostream& out)
{
    Phantom phantom;
    try {
        phantom = generate_phantom(cfg.phantom);
    } catch (const PreconditionError& e) {
        throw InputError(e.what());
    }
    GrayImage8 truth(phantom.truth.width(), phantom.truth.height());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth[i] = static_cast<std::uint8_t>(std::min(phantom.truth[i], 255));
    }
    write_file_atomic(prefix + ".pgm", write_pgm(phantom.image));
    write_file_atomic(prefix + "_gt.pgm", write_pgm(truth));
    out << "wrote " << prefix << ".pgm " << prefix << "_gt.pgm\n";
    return kOk;
}

int cmd_eval(const std::string& batch_path, const CliConfig& cfg, const std::string& out_path,
             std::ostream& out)
{
    std::vector<PhantomConfig> batch;
    try {
        batch = load_batch(read_json_file(batch_path), cfg.phantom);
    } catch (const json::exception& e) {
        throw InputError(batch_path + ": " + e.what());
    }
    if (batch.empty()) {
        throw InputError(batch_path + ": batch is empty");
    }
    const auto report = evaluate(batch, cfg.pipeline);
    write_file_atomic(out_path, report_json(report).dump(2) + "\n");
    out << "mean_dice=" << format_double(report.mean_dice) << "\n";
    return kOk;
}

}  // namespace

void apply_config_json(const json& j, CliConfig& cfg)
{
    std::set<std::string> known{"se_radius",        "connectivity", "min_marker_area",
                                "fg_shrink_radius", "tumor_policy", "wavelet",
                                "levels"};
    known.insert(kPhantomKeys.begin(), kPhantomKeys.end());
    reject_unknown(j, known, "config");

    try {
        auto& p = cfg.pipeline;
        p.se_radius = j.value("se_radius", p.se_radius);
        if (j.contains("connectivity")) {
            p.connectivity = parse_connectivity(j.at("connectivity").get<int>());
        }
        p.min_marker_area = j.value("min_marker_area", p.min_marker_area);
        p.fg_shrink_radius = j.value("fg_shrink_radius", p.fg_shrink_radius);
        if (j.contains("tumor_policy")) {
            p.tumor_policy = parse_policy(j.at("tumor_policy").get<std::string>());
        }
        if (j.contains("wavelet")) {
            cfg.wavelet = parse_wavelet(j.at("wavelet").get<std::string>());
        }
        cfg.levels = j.value("levels", cfg.levels);

        json phantom_part = json::object();
        for (const auto& key : kPhantomKeys) {
            if (j.contains(key)) {
                phantom_part[key] = j.at(key);
            }
        }
        cfg.phantom = phantom_from_json(phantom_part, cfg.phantom);
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
}

json config_to_json(const CliConfig& cfg)
{
    json j = phantom_to_json(cfg.phantom);
    j["se_radius"] = cfg.pipeline.se_radius;
    j["connectivity"] = std::stoi(connectivity_name(cfg.pipeline.connectivity));
    j["min_marker_area"] = cfg.pipeline.min_marker_area;
    j["fg_shrink_radius"] = cfg.pipeline.fg_shrink_radius;
    j["tumor_policy"] = policy_name(cfg.pipeline.tumor_policy);
    j["wavelet"] = wavelet_name(cfg.wavelet);
    j["levels"] = cfg.levels;
    return j;
}

PhantomConfig phantom_from_json(const json& j, const PhantomConfig& base)
{
    reject_unknown(j, kPhantomKeys, "phantom");
    PhantomConfig cfg = base;
    cfg.width = j.value("width", cfg.width);
    cfg.height = j.value("height", cfg.height);
    if (j.contains("organ")) {
        cfg.organ = ellipse_from_json(j.at("organ"), cfg.organ, "organ");
    }
    cfg.organ_mean = j.value("organ_mean", cfg.organ_mean);
    cfg.background_mean = j.value("background_mean", cfg.background_mean);
    if (j.contains("tumors")) {
        cfg.tumors.clear();
        for (const auto& t : j.at("tumors")) {
            TumorSpec spec;
            spec.shape = ellipse_from_json(t, Ellipse{}, "tumor");
            if (!t.contains("semi_x") || !t.contains("semi_y") || !t.contains("cx") ||
                !t.contains("cy")) {
                throw InputError("tumor entries need cx, cy, semi_x and semi_y");
            }
            spec.mean = t.value("mean", spec.mean);
            cfg.tumors.push_back(spec);
        }
    }
    cfg.noise_sigma = j.value("sigma", cfg.noise_sigma);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

json phantom_to_json(const PhantomConfig& cfg)
{
    json tumors = json::array();
    for (const auto& t : cfg.tumors) {
        json e = ellipse_to_json(t.shape);
        e["mean"] = t.mean;
        tumors.push_back(e);
    }
    return json{{"width", cfg.width},
                {"height", cfg.height},
                {"organ", ellipse_to_json(cfg.organ)},
                {"organ_mean", cfg.organ_mean},
                {"background_mean", cfg.background_mean},
                {"tumors", tumors},
                {"sigma", cfg.noise_sigma},
                {"seed", cfg.seed}};
}

json feature_json(const FeatureVector& fv, int label)
{
    json subbands = json::array();
    for (const auto& sb : fv.subbands) {
        subbands.push_back(json{{"level", sb.level},
                                {"band", band_name(sb.band)},
                                {"energy", sb.energy},
                                {"norm_energy", sb.norm_energy},
                                {"log_energy", sb.log_energy}});
    }
    return json{{"label", label},
                {"area", fv.area},
                {"mean", fv.mean},
                {"std", fv.std_dev},
                {"subbands", subbands}};
}

json report_json(const EvaluationReport& report)
{
    json phantoms = json::array();
    for (const auto& p : report.phantoms) {
        json entry{{"seed", p.seed},
                   {"dice", p.dice},
                   {"jaccard", p.jaccard},
                   {"regions", p.regions}};
        if (p.error) {
            entry["error"] = *p.error;
        }
        phantoms.push_back(entry);
    }
    return json{{"phantoms", phantoms},
                {"mean_dice", report.mean_dice},
                {"min_dice", report.min_dice},
                {"max_dice", report.max_dice}};
}

std::vector<PhantomConfig> load_batch(const json& j, const PhantomConfig& base)
{
    if (j.is_array()) {
        std::vector<PhantomConfig> batch;
        for (const auto& entry : j) {
            batch.push_back(phantom_from_json(entry, base));
        }
        return batch;
    }
    if (j.is_object() && j.contains("phantoms") && j.size() == 1) {
        return load_batch(j.at("phantoms"), base);
    }
    if (j.is_object() && j.contains("default_batch") && j.size() == 1) {
        const auto& spec = j.at("default_batch");
        reject_unknown(spec, {"count", "contrast", "sigma", "base_seed"}, "default_batch");
        return default_batch(spec.value("count", 20), spec.value("contrast", 40.0),
                             spec.value("sigma", 8.0), spec.value("base_seed", std::uint64_t{1}));
    }
    throw InputError("batch file must be an array, {\"phantoms\": [...]}, or {\"default_batch\": {...}}");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Marker-controlled watershed lesion segmentation"};
    app.require_subcommand(1);

    Overrides seg_flags;
    std::string seg_input;
    auto* seg_cmd = app.add_subcommand("segment", "Segment a PGM and dump every pipeline stage");
    seg_cmd->add_option("input", seg_input, "Input PGM")->required();
    add_shared_flags(seg_cmd, seg_flags);
    seg_cmd->add_option("--out", seg_flags.out, "Output directory")->required();

    std::string otsu_input;
    auto* otsu_cmd = app.add_subcommand("otsu", "Print the Otsu threshold of a PGM");
    otsu_cmd->add_option("input", otsu_input, "Input PGM")->required();

    Overrides phantom_flags;
    auto* phantom_cmd = app.add_subcommand("phantom", "Write a synthetic phantom and its ground truth");
    add_shared_flags(phantom_cmd, phantom_flags);
    phantom_cmd->add_option("--sigma", phantom_flags.sigma, "Gaussian noise sigma");
    phantom_cmd->add_option("--out", phantom_flags.out, "Output path prefix")->required();

    Overrides eval_flags;
    std::string eval_batch;
    auto* eval_cmd = app.add_subcommand("eval", "Segment a phantom batch and report tumor Dice");
    eval_cmd->add_option("batch", eval_batch, "Batch JSON file")->required();
    add_shared_flags(eval_cmd, eval_flags);
    eval_cmd->add_option("--out", eval_flags.out, "Report JSON path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        if (*seg_cmd) {
            return cmd_segment(seg_input, resolve(seg_flags), seg_flags.out, out);
        }
        if (*otsu_cmd) {
            return cmd_otsu(otsu_input, out);
        }
        if (*phantom_cmd) {
            return cmd_phantom(resolve(phantom_flags), phantom_flags.out, out);
        }
        if (*eval_cmd) {
            return cmd_eval(eval_batch, resolve(eval_flags), eval_flags.out, out);
        }
    } catch (const NoForegroundMarkersError& e) {
        err << "error: " << e.what() << "\n";
        return kPipelineError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace livseg::cli
