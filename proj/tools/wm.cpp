#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wmlab/artifacts.h"
#include "wmlab/attacks.h"
#include "wmlab/harness.h"
#include "wmlab/png_io.h"
#include "wmlab/rng.h"
#include "wmlab/spectral.h"
#include "wmlab/watermark.h"

namespace fs = std::filesystem;
using namespace wmlab;
using nlohmann::ordered_json;

namespace {

constexpr int kExitPartial = 2;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

WatermarkKey load_key(const std::string& path) { return WatermarkKey::from_json(read_text(path)); }

/// A message argument is either a hex string or a path to a file holding one.
BitMessage load_message(const std::string& arg, std::size_t bits) {
    std::string hex = fs::exists(arg) ? trim(read_text(arg)) : arg;
    return BitMessage::from_hex(hex, bits);
}

ExperimentConfig load_config(const std::string& path) {
    return path.empty() ? ExperimentConfig{} : ExperimentConfig::from_json(read_text(path));
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Watermark robustness lab: embed, detect, attack and score invisible watermarks."};
    app.require_subcommand(1);

    // keygen
    std::string family = "spread_spectrum", out;
    std::uint64_t seed = 0;
    double amplitude = -1.0;
    auto* keygen = app.add_subcommand("keygen", "Write a watermark key file");
    keygen->add_option("--family", family, "spread_spectrum | fourier_ring | fourier_square | boundary_frame");
    keygen->add_option("--seed", seed, "Key seed");
    keygen->add_option("--amplitude", amplitude, "Override the family's default amplitude");
    keygen->add_option("--out", out, "Key file (JSON)")->required();

    // embed
    std::string key_path, in_path, message_arg;
    std::size_t bits = 100;
    auto* embed_cmd = app.add_subcommand("embed", "Embed a watermark into a PNG");
    embed_cmd->add_option("--key", key_path, "Key file")->required();
    embed_cmd->add_option("--in", in_path, "Cover PNG")->required();
    embed_cmd->add_option("--out", out, "Watermarked PNG")->required();
    embed_cmd->add_option("--message", message_arg, "Hex message or file (random from --seed when absent)");
    embed_cmd->add_option("--bits", bits, "Message length");
    embed_cmd->add_option("--seed", seed, "Seed for a random message");

    // decode
    std::string reference_arg;
    auto* decode_cmd = app.add_subcommand("decode", "Decode or detect a watermark");
    decode_cmd->add_option("--key", key_path, "Key file")->required();
    decode_cmd->add_option("--in", in_path, "Image PNG")->required();
    decode_cmd->add_option("--bits", bits, "Message length");
    decode_cmd->add_option("--reference", reference_arg, "Hex reference message or file");

    // attack
    std::string method = "auto", config_path, x_w_path;
    std::vector<std::string> inputs;
    int dx = 7, passes = 1, steps = 50;
    double strength = 0.16;
    auto* attack_cmd = app.add_subcommand("attack", "Run a removal attack");
    attack_cmd->add_option("--method", method, "translate | filter | regen | refine | colorxfer | auto")
        ->check(CLI::IsMember({"translate", "filter", "regen", "refine", "colorxfer", "auto"}));
    attack_cmd->add_option("--in", inputs, "Input PNG(s); auto accepts several")->required();
    attack_cmd->add_option("--out", out, "Output PNG, or directory for auto")->required();
    attack_cmd->add_option("--reference", x_w_path, "Watermarked original (refine, colorxfer)");
    attack_cmd->add_option("--dx", dx, "Translation in pixels");
    attack_cmd->add_option("--strength", strength, "Regeneration strength s");
    attack_cmd->add_option("--passes", passes, "Regeneration passes");
    attack_cmd->add_option("--steps", steps, "Refinement steps");
    attack_cmd->add_option("--seed", seed, "Seed");
    attack_cmd->add_option("--config", config_path, "Experiment config (pipeline section is used)");

    // cluster
    std::string dump_dir;
    auto* cluster_cmd = app.add_subcommand("cluster", "Score artifacts and assign clusters");
    cluster_cmd->add_option("--in", inputs, "Image PNG(s)")->required();
    cluster_cmd->add_option("--out", out, "Manifest JSON (stdout when absent)");
    cluster_cmd->add_option("--dump-spectra", dump_dir, "Directory for centred log-magnitude PNGs");
    cluster_cmd->add_option("--config", config_path, "Experiment config (pipeline.thresholds is used)");

    // calibrate
    std::size_t n = 10000;
    double fpr = 0.001;
    int size = 128;
    unsigned threads = 0;
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate a detection threshold on clean covers");
    calibrate_cmd->add_option("--key", key_path, "Key file")->required();
    calibrate_cmd->add_option("--n", n, "Calibration images");
    calibrate_cmd->add_option("--fpr", fpr, "Target false-positive rate");
    calibrate_cmd->add_option("--seed", seed, "Corpus seed");
    calibrate_cmd->add_option("--size", size, "Image side");
    calibrate_cmd->add_option("--bits", bits, "Message length (spread spectrum)");
    calibrate_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    calibrate_cmd->add_option("--out", out, "Threshold JSON (stdout when absent)");

    // evaluate
    std::optional<std::uint64_t> eval_seed;
    std::optional<unsigned> eval_threads;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Run an end-to-end experiment");
    evaluate_cmd->add_option("--config", config_path, "Experiment config JSON");
    evaluate_cmd->add_option("--seed", eval_seed, "Override the config seed");
    evaluate_cmd->add_option("--threads", eval_threads, "Override the thread count");
    evaluate_cmd->add_option("--out", out, "Output directory (overrides config)");

    // report
    std::string csv_out;
    auto* report_cmd = app.add_subcommand("report", "Summarise a report.json");
    report_cmd->add_option("--in", in_path, "report.json")->required();
    report_cmd->add_option("--csv", csv_out, "Also write per-cluster summary CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*keygen) {
            Family f = family_from_string(family);
            WatermarkKey k;
            switch (f) {
                case Family::SpreadSpectrum: k = WatermarkKey::spread_spectrum(seed); break;
                case Family::FourierRing: k = WatermarkKey::fourier_ring(seed); break;
                case Family::FourierSquare: k = WatermarkKey::fourier_square(seed); break;
                case Family::BoundaryFrame: k = WatermarkKey::boundary_frame(seed); break;
            }
            if (amplitude >= 0.0) k.amplitude = amplitude;
            write_text(out, k.to_json() + "\n");
            return 0;
        }

        if (*embed_cmd) {
            WatermarkKey k = load_key(key_path);
            RasterImage cover = read_png(in_path);
            BitMessage m = message_arg.empty() ? BitMessage::random(seed, bits) : load_message(message_arg, bits);
            write_png(out, embed(cover, k, &m));
            if (k.family == Family::SpreadSpectrum) std::cout << m.to_hex() << "\n";
            return 0;
        }

        if (*decode_cmd) {
            WatermarkKey k = load_key(key_path);
            RasterImage img = read_png(in_path);
            ordered_json j;
            j["family"] = to_string(k.family);
            if (k.family == Family::SpreadSpectrum) {
                std::optional<BitMessage> ref;
                if (!reference_arg.empty()) ref = load_message(reference_arg, bits);
                auto r = ss_decode(img, k, bits, ref ? &*ref : nullptr);
                j["message"] = r.message.to_hex();
                if (ref) j["distance"] = r.distance;
            } else {
                double stat = k.family == Family::BoundaryFrame ? boundary_detect(img, k) : fourier_detect(img, k);
                j["statistic"] = stat;
                j["distance"] = 1.0 - stat;
            }
            print_json(j);
            return 0;
        }

        if (*attack_cmd) {
            ExperimentConfig cfg = load_config(config_path);
            PipelineConfig pc = cfg.pipeline;
            pc.seed = seed;
            if (method == "auto") {
                std::vector<RasterImage> images;
                for (const auto& p : inputs) images.push_back(read_png(p));
                auto res = blackbox_pipeline(images, pc);
                fs::create_directories(out);
                bool partial = false;
                ordered_json files = ordered_json::array();
                for (std::size_t i = 0; i < images.size(); ++i) {
                    std::string name = fs::path(inputs[i]).stem().string() + "_attacked.png";
                    write_png((fs::path(out) / name).string(), res.images[i]);
                    files.push_back({{"input", inputs[i]}, {"output", name}});
                    partial |= !res.manifest[i].ok;
                }
                auto manifest = ordered_json::parse(res.manifest_json());
                manifest["files"] = files;
                write_text((fs::path(out) / "manifest.json").string(), manifest.dump(2) + "\n");
                return partial ? kExitPartial : 0;
            }
            if (inputs.size() != 1) throw Error("attack: --method " + method + " takes exactly one --in");
            RasterImage x = read_png(inputs.front());
            RasterImage result;
            if (method == "translate") {
                result = translation_attack(x, dx);
            } else if (method == "regen") {
                result = regenerate(x, {strength, passes, pc.denoise_threshold_scale, seed});
            } else if (method == "filter") {
                result = apply_spectral_filter(x, train_pipeline_filter(x.width(), x.height(), pc));
            } else {
                if (x_w_path.empty()) throw Error("attack: --method " + method + " needs --reference");
                RasterImage x_w = read_png(x_w_path);
                if (method == "refine") {
                    RefineConfig rc = pc.refine;
                    rc.steps = steps;
                    result = refine(x, x_w, rc);
                } else {
                    auto r = color_contrast_transfer(x, x_w);
                    if (r.contrast_skipped) std::cerr << "warning: flat lightness, contrast step skipped\n";
                    result = std::move(r.image);
                }
            }
            write_png(out, result);
            return 0;
        }

        if (*cluster_cmd) {
            ExperimentConfig cfg = load_config(config_path);
            ordered_json j = ordered_json::array();
            if (!dump_dir.empty()) fs::create_directories(dump_dir);
            for (const auto& p : inputs) {
                RasterImage img = read_png(p);
                ArtifactScores s = artifact_scores(img);
                j.push_back({{"image", p},
                             {"scores", {{"boundary", s.boundary}, {"ring", s.ring}, {"square", s.square}}},
                             {"label", to_string(classify_cluster(s, cfg.pipeline.thresholds))}});
                if (!dump_dir.empty())
                    write_png_plane((fs::path(dump_dir) / (fs::path(p).stem().string() + "_spectrum.png")).string(),
                                    centered_log_magnitude(fft2(img)));
            }
            if (out.empty())
                print_json(j);
            else
                write_text(out, j.dump(2) + "\n");
            return 0;
        }

        if (*calibrate_cmd) {
            Detector det{load_key(key_path), bits};
            auto t = calibrate_threshold(det, n, fpr, seed, size, threads);
            ordered_json j = {{"family", to_string(t.detector_family)},
                              {"value", t.value},
                              {"fpr_target", t.fpr_target},
                              {"calibration_n", t.calibration_n}};
            if (!t.warning.empty()) {
                j["warning"] = t.warning;
                std::cerr << "warning: " << t.warning << "\n";
            }
            if (out.empty())
                print_json(j);
            else
                write_text(out, j.dump(2) + "\n");
            return 0;
        }

        if (*evaluate_cmd) {
            ExperimentConfig cfg = load_config(config_path);
            if (eval_seed) cfg.seed = *eval_seed;
            if (eval_threads) cfg.threads = *eval_threads;
            if (!out.empty()) cfg.output_dir = out;
            EvalReport r = run_experiment(cfg);
            std::printf("detection %.4f  quality %.4f (psnr %.2f, ssim %.4f, nmi %.4f)  total %.4f%s\n",
                        r.detection_score, r.quality_aggregate, r.quality.psnr, r.quality.ssim, r.quality.nmi, r.total,
                        r.partial ? "  [partial]" : "");
            return r.partial ? kExitPartial : 0;
        }

        if (*report_cmd) {
            auto j = nlohmann::json::parse(read_text(in_path));
            std::printf("detection %.4f  quality %.4f  total %.4f  partial %s\n", j.at("detection_score").get<double>(),
                        j.at("quality_aggregate").get<double>(), j.at("total").get<double>(),
                        j.at("partial").get<bool>() ? "yes" : "no");
            for (const auto& t : j.at("thresholds"))
                std::printf("threshold %-16s %.6f (fpr %.4g, n %zu)\n", t.at("family").get<std::string>().c_str(),
                            t.at("value").get<double>(), t.at("fpr_target").get<double>(),
                            t.at("calibration_n").get<std::size_t>());
            struct Group {
                std::size_t n = 0, flagged = 0, failed = 0;
                double psnr = 0, ssim = 0, nmi = 0;
            };
            std::map<std::string, Group> groups;
            for (const auto& row : j.at("images")) {
                std::string key = row.at("watermark").get<std::string>();
                if (row.contains("cluster")) key += " / " + row.at("cluster").get<std::string>();
                auto& g = groups[key];
                if (!row.at("ok").get<bool>()) {
                    ++g.failed;
                    continue;
                }
                ++g.n;
                g.flagged += row.at("flagged").get<bool>() ? 1 : 0;
                g.psnr += row.at("psnr").get<double>();
                g.ssim += row.at("ssim").get<double>();
                g.nmi += row.at("nmi").get<double>();
            }
            std::ostringstream csv;
            csv << "group,images,failed,detection,psnr,ssim,nmi\n";
            for (const auto& [name, g] : groups) {
                double k = g.n ? double(g.n) : 1.0;
                std::printf("%-48s n=%-4zu failed=%-3zu det=%.3f psnr=%.2f ssim=%.4f nmi=%.4f\n", name.c_str(), g.n,
                            g.failed, g.flagged / k, g.psnr / k, g.ssim / k, g.nmi / k);
                csv << name << ',' << g.n << ',' << g.failed << ',' << g.flagged / k << ',' << g.psnr / k << ','
                    << g.ssim / k << ',' << g.nmi / k << '\n';
            }
            if (!csv_out.empty()) write_text(csv_out, csv.str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
