#include "laban/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "laban/errors.hpp"
#include "laban/util.hpp"

namespace laban {

using nlohmann::json;

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string motion_to_json(const Motion& motion) {
    json frames = json::array();
    for (std::size_t t = 0; t < motion.frames; ++t) {
        json frame = json::array();
        for (std::size_t j = 0; j < motion.joints(); ++j) {
            frame.push_back({motion.at(t, j, 0), motion.at(t, j, 1), motion.at(t, j, 2)});
        }
        frames.push_back(std::move(frame));
    }
    json doc;
    doc["fps"] = motion.fps;
    doc["joint_names"] = motion.joint_names;
    doc["frames"] = std::move(frames);
    return doc.dump(2) + "\n";
}

namespace {

Motion motion_from_parsed(const json& doc, const std::string& context) {
    Motion motion;
    try {
        motion.fps = doc.at("fps").get<double>();
        motion.joint_names = doc.at("joint_names").get<std::vector<std::string>>();
        const json& frames = doc.at("frames");
        motion.frames = frames.size();
        motion.positions.reserve(motion.frames * motion.joints() * 3);
        std::size_t t = 0;
        for (const json& frame : frames) {
            if (frame.size() != motion.joints()) {
                throw IoError(context + ": frame " + std::to_string(t) + " has " +
                              std::to_string(frame.size()) + " joints, expected " +
                              std::to_string(motion.joints()));
            }
            for (const json& joint : frame) {
                if (joint.size() != 3) {
                    throw IoError(context + ": frame " + std::to_string(t) +
                                  " has a joint without 3 coordinates");
                }
                for (const json& v : joint) motion.positions.push_back(v.get<double>());
            }
            ++t;
        }
    } catch (const json::exception& e) {
        throw IoError(context + ": " + e.what());
    }
    validate_motion(motion);
    return motion;
}

json family_to_json(const MotionFamily& family) {
    json doc;
    doc["family_id"] = family.family_id;
    doc["frequency"] = family.frequency;
    doc["amplitude"] = family.amplitude;
    doc["spread"] = family.spread;
    doc["bounce"] = family.bounce;
    doc["limb_phase"] = family.limb_phase;
    doc["jitter_sigma"] = family.jitter_sigma;
    return doc;
}

MotionFamily family_from_json(const json& doc, const std::string& context) {
    MotionFamily family;
    try {
        family.family_id = doc.at("family_id").get<std::string>();
        family.frequency = doc.at("frequency").get<double>();
        family.amplitude = doc.at("amplitude").get<double>();
        family.spread = doc.at("spread").get<double>();
        family.bounce = doc.at("bounce").get<double>();
        family.limb_phase = doc.at("limb_phase").get<std::array<double, 4>>();
        family.jitter_sigma = doc.at("jitter_sigma").get<double>();
    } catch (const json::exception& e) {
        throw IoError(context + ": " + e.what());
    }
    return family;
}

json positions_to_json(const Motion& motion) {
    json frames = json::array();
    for (std::size_t t = 0; t < motion.frames; ++t) {
        json frame = json::array();
        for (std::size_t j = 0; j < motion.joints(); ++j) {
            frame.push_back({motion.at(t, j, 0), motion.at(t, j, 1), motion.at(t, j, 2)});
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace

Motion motion_from_json(const std::string& text, const std::string& context) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(context + ": " + e.what());
    }
    return motion_from_parsed(doc, context);
}

void save_motion(const std::filesystem::path& path, const Motion& motion) {
    atomic_write(path, motion_to_json(motion));
}

Motion load_motion(const std::filesystem::path& path) {
    return motion_from_json(read_file(path), path.string());
}

void save_series_csv(const std::filesystem::path& path, const LabanSeries& series) {
    atomic_write(path, series_to_csv(series));
}

void save_loss_csv(const std::filesystem::path& path, const std::vector<LossSample>& trajectory) {
    std::ostringstream out;
    out << "step,t,loss\n";
    for (const LossSample& sample : trajectory) {
        out << sample.step << ',' << sample.t << ',' << fmt_double(sample.loss) << '\n';
    }
    atomic_write(path, out.str());
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
    std::ostringstream out;
    for (const DatasetRecord& record : dataset.records) {
        json line;
        line["condition_id"] = record.condition_id;
        line["family"] = family_to_json(record.family);
        line["fps"] = record.motion.fps;
        line["positions"] = positions_to_json(record.motion);
        out << line.dump() << '\n';
    }
    atomic_write(path, out.str());

    json meta;
    meta["frames"] = dataset.frames;
    meta["fps"] = dataset.fps;
    meta["skeleton"]["joint_names"] = dataset.skeleton.joint_names;
    meta["skeleton"]["effector_indices"] = dataset.skeleton.effector_indices;
    json conditions = json::array();
    for (const MotionFamily& family : dataset.conditions) conditions.push_back(family_to_json(family));
    meta["conditions"] = std::move(conditions);
    atomic_write(path.string() + ".meta.json", meta.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& path) {
    Dataset dataset;
    const std::string meta_path = path.string() + ".meta.json";
    json meta;
    try {
        meta = json::parse(read_file(meta_path));
        dataset.frames = meta.at("frames").get<std::size_t>();
        dataset.fps = meta.at("fps").get<double>();
        dataset.skeleton.joint_names =
            meta.at("skeleton").at("joint_names").get<std::vector<std::string>>();
        dataset.skeleton.effector_indices =
            meta.at("skeleton").at("effector_indices").get<std::vector<std::size_t>>();
        for (const json& fam : meta.at("conditions")) {
            dataset.conditions.push_back(family_from_json(fam, meta_path));
        }
    } catch (const json::exception& e) {
        throw IoError(meta_path + ": " + e.what());
    }

    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string context = path.string() + ":" + std::to_string(line_no);
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError(context + ": " + e.what());
        }
        DatasetRecord record;
        try {
            record.condition_id = doc.at("condition_id").get<int>();
            record.family = family_from_json(doc.at("family"), context);
            json m;
            m["fps"] = doc.at("fps");
            m["joint_names"] = dataset.skeleton.joint_names;
            m["frames"] = doc.at("positions");
            record.motion = motion_from_parsed(m, context);
        } catch (const json::exception& e) {
            throw IoError(context + ": " + e.what());
        }
        dataset.records.push_back(std::move(record));
    }
    return dataset;
}

void save_model(const std::filesystem::path& path, const Model& model) {
    const DenoiserArch& arch = model.denoiser->arch();
    json doc;
    doc["version"] = Model::kVersion;
    doc["schedule"]["n_steps"] = model.schedule.n_steps;
    doc["schedule"]["beta_min"] = model.schedule.beta_min;
    doc["schedule"]["beta_max"] = model.schedule.beta_max;
    doc["skeleton"]["joint_names"] = model.skeleton.joint_names;
    doc["skeleton"]["effector_indices"] = model.skeleton.effector_indices;
    doc["frames"] = model.frames;
    doc["fps"] = model.fps;
    doc["denoiser"]["kind"] = "mlp-tanh-2h";
    doc["denoiser"]["motion_dim"] = arch.motion_dim;
    doc["denoiser"]["hidden"] = arch.hidden;
    doc["denoiser"]["d_embed"] = arch.d_embed;
    doc["denoiser"]["time_freqs"] = arch.time_freqs;
    doc["denoiser"]["n_conditions"] = model.denoiser->n_conditions();
    doc["denoiser"]["parameters"] = model.denoiser->flatten_parameters();
    atomic_write(path, doc.dump() + "\n");
}

Model load_model(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    Model model;
    try {
        const int version = doc.at("version").get<int>();
        if (version != Model::kVersion) {
            throw IoError(path.string() + ": unsupported checkpoint version " +
                          std::to_string(version));
        }
        model.schedule = make_schedule(doc.at("schedule").at("n_steps").get<int>(),
                                       doc.at("schedule").at("beta_min").get<double>(),
                                       doc.at("schedule").at("beta_max").get<double>());
        model.skeleton.joint_names =
            doc.at("skeleton").at("joint_names").get<std::vector<std::string>>();
        model.skeleton.effector_indices =
            doc.at("skeleton").at("effector_indices").get<std::vector<std::size_t>>();
        model.frames = doc.at("frames").get<std::size_t>();
        model.fps = doc.at("fps").get<double>();

        const json& den = doc.at("denoiser");
        const std::string kind = den.at("kind").get<std::string>();
        if (kind != "mlp-tanh-2h") {
            throw IoError(path.string() + ": unsupported denoiser kind '" + kind + "'");
        }
        DenoiserArch arch;
        arch.motion_dim = den.at("motion_dim").get<std::size_t>();
        arch.hidden = den.at("hidden").get<std::size_t>();
        arch.d_embed = den.at("d_embed").get<std::size_t>();
        arch.time_freqs = den.at("time_freqs").get<std::size_t>();
        arch.n_steps = model.schedule.n_steps;
        const auto n_conditions = den.at("n_conditions").get<std::size_t>();
        auto denoiser = std::make_shared<ToyDenoiser>(arch, n_conditions, 0);
        denoiser->load_parameters(den.at("parameters").get<std::vector<double>>());
        model.denoiser = std::move(denoiser);
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    if (model.frames * model.skeleton.joints() * 3 != model.denoiser->motion_dim()) {
        throw IoError(path.string() + ": skeleton metadata does not match denoiser width");
    }
    return model;
}

void save_change_matrix_csv(const std::filesystem::path& path, const ChangeMatrix& matrix) {
    std::ostringstream out;
    out << "row,mean_weight,mean_time,mean_flow,mean_shape,"
           "std_weight,std_time,std_flow,std_shape\n";
    for (std::size_t r = 0; r < 4; ++r) {
        out << channel_name(r);
        for (std::size_t c = 0; c < 4; ++c) out << ',' << fmt_double(matrix.mean[r][c]);
        for (std::size_t c = 0; c < 4; ++c) out << ',' << fmt_double(matrix.stdev[r][c]);
        out << '\n';
    }
    atomic_write(path, out.str());
}

std::string change_matrix_report_json(const ChangeMatrix& matrix, GuidanceMethod method,
                                      const EvalConfig& cfg, std::size_t n_conditions) {
    json doc;
    doc["method"] = method_name(method);
    doc["matrix_mean"] = matrix.mean;
    doc["matrix_std"] = matrix.stdev;
    doc["diagonality"] = diagonality(matrix.mean);
    doc["n_runs"] = matrix.n_runs;
    doc["n_conditions"] = n_conditions;
    doc["skipped"] = matrix.skipped;
    doc["single_sample"] = matrix.single_sample;
    doc["against_baseline"] = cfg.against_baseline;
    doc["master_seed"] = cfg.master_seed;
    doc["stride"] = cfg.stride;
    return doc.dump(2) + "\n";
}

}  // namespace laban
