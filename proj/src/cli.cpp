#include "swimpose/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "swimpose/checkpoint.hpp"
#include "swimpose/dataio.hpp"
#include "swimpose/metrics.hpp"
#include "swimpose/png_io.hpp"
#include "swimpose/synthgen.hpp"
#include "swimpose/train.hpp"

namespace fs = std::filesystem;

namespace swimpose {

namespace {

// ---- shared plumbing -----------------------------------------------------

std::string default_out(const std::string& flag_value, const std::string& cmd) {
    if (!flag_value.empty()) return flag_value;
    if (const char* root = std::getenv("SWIMPOSE_OUT"))
        return (fs::path(root) / cmd).string();
    return (fs::path("out") / cmd).string();
}

std::string resolve_manifest(const std::string& dataset) {
    if (dataset.empty()) throw ValidationError("no dataset given (--dataset)");
    const fs::path p(dataset);
    return p.extension() == ".json" ? p.string() : (p / "manifest.json").string();
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << content;
}

void check_input_size(const std::vector<VideoClip>& clips, int input_size) {
    for (const auto& clip : clips)
        for (const auto& f : clip.frames)
            if (f.width != input_size || f.height != input_size)
                throw ValidationError(
                    "dataset/model mismatch: clip '" + clip.clip_id + "' frames are " +
                    std::to_string(f.width) + "x" + std::to_string(f.height) +
                    " but the checkpoint expects " + std::to_string(input_size) + "x" +
                    std::to_string(input_size));
}

/// A trained model of either kind, selected by the checkpoint's tag.
struct LoadedModel {
    std::string kind;
    PoseNet posenet;
    TemporalNet temporal;

    const ModelConfig& config() const {
        return kind == "temporal" ? temporal.config() : posenet.config();
    }
    ClipPredictions predict(const VideoClip& clip, ClipConfidences* conf) const {
        return kind == "temporal" ? predict_clip(temporal, clip, conf)
                                  : predict_clip(posenet, clip, conf);
    }
};

LoadedModel load_model(const std::string& path) {
    LoadedModel m;
    m.kind = load_checkpoint(path).kind;
    if (m.kind == "posenet")
        m.posenet = PoseNet::load(path);
    else if (m.kind == "temporal")
        m.temporal = TemporalNet::load(path);
    else
        throw ValidationError("checkpoint: '" + path + "' holds unknown kind '" +
                              m.kind + "'");
    return m;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
    SynthConfig cfg;
    std::string styles_csv;
    std::string out;
};

int cmd_synth(SynthArgs& a) {
    if (!a.styles_csv.empty()) {
        a.cfg.styles.clear();
        std::stringstream ss(a.styles_csv);
        std::string name;
        while (std::getline(ss, name, ','))
            a.cfg.styles.push_back(style_from_name(name));
    }
    a.cfg.validate();
    const std::string out = default_out(a.out, "synth");
    const std::vector<VideoClip> clips = generate(a.cfg);
    write_dataset(out, clips, default_split(a.cfg));

    Dataset ds = load_dataset((fs::path(out) / "manifest.json").string(), false);
    std::cout << "dataset written to " << out << "\n" << summary_table(ds);
    return 0;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
    std::string config_file;
    RunConfig rc;
    CLI::App* sub = nullptr;
};

int cmd_train(TrainArgs& a) {
    RunConfig rc;
    if (!a.config_file.empty()) {
        std::ifstream in(a.config_file);
        if (!in) throw ValidationError("train: cannot open config '" + a.config_file + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("train: config '" + a.config_file +
                                  "' is not valid JSON: " + e.what());
        }
        try {
            rc = run_config_from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("train: config '" + a.config_file + "': " + e.what());
        }
    }

    // Flags override whatever the config file set.
    const auto took = [&](const std::string& flag) { return a.sub->count(flag) > 0; };
    if (took("--mode")) rc.mode = a.rc.mode;
    if (took("--dataset")) rc.dataset = a.rc.dataset;
    if (took("--out")) rc.output_dir = a.rc.output_dir;
    if (took("--lr")) rc.learning_rate = a.rc.learning_rate;
    if (took("--iterations")) rc.iterations = a.rc.iterations;
    if (took("--batch-size")) rc.batch_size = a.rc.batch_size;
    if (took("--seed")) rc.seed = a.rc.seed;
    if (took("--grad-clip")) rc.grad_clip = a.rc.grad_clip;
    if (took("--init-checkpoint")) rc.init_checkpoint = a.rc.init_checkpoint;
    if (took("--stages")) rc.model.num_stages = a.rc.model.num_stages;
    if (took("--input-size")) rc.model.input_size = a.rc.model.input_size;
    if (took("--heatmap-size")) rc.model.heatmap_size = a.rc.model.heatmap_size;
    if (took("--sigma")) rc.model.gaussian_sigma = a.rc.model.gaussian_sigma;
    if (took("--channel-mult")) rc.model.channel_mult = a.rc.model.channel_mult;
    if (took("--first-conditioned-stage"))
        rc.model.first_conditioned_stage = a.rc.model.first_conditioned_stage;
    if (took("--temporal-l")) rc.model.seq_spec = a.rc.model.seq_spec;

    rc.output_dir = default_out(rc.output_dir, "train");
    rc.validate();

    const Dataset ds = load_dataset(resolve_manifest(rc.dataset), true);
    const std::vector<VideoClip> train_clips = ds.train();
    if (train_clips.empty()) throw ValidationError("train: the dataset has no train clips");

    const bool temporal = rc.mode.rfind("temporal-", 0) == 0;
    const TrainResult result = temporal ? train_temporal(rc, train_clips)
                                        : train_posenet(rc, train_clips);
    std::cout << "mode " << rc.mode << ": " << result.losses.size()
              << " iterations, final loss " << result.losses.back() << "\n"
              << "checkpoint written to " << result.checkpoint_path << "\n";
    return 0;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
    std::string checkpoint, dataset, out, split = "test", alphas_csv;
    double alpha = 0.2;
};

std::vector<double> parse_alphas(const std::string& csv) {
    std::vector<double> alphas;
    if (csv.empty()) {
        for (int i = 1; i <= 15; ++i) alphas.push_back(0.02 * i);
        return alphas;
    }
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            alphas.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ValidationError("eval: bad alpha value '" + tok + "'");
        }
    }
    return alphas;
}

int cmd_eval(EvalArgs& a) {
    if (a.checkpoint.empty()) throw ValidationError("eval: no checkpoint given");
    const std::string out = default_out(a.out, "eval");
    const LoadedModel model = load_model(a.checkpoint);

    const Dataset ds = load_dataset(resolve_manifest(a.dataset), true);
    const std::vector<VideoClip> clips = ds.select(a.split);
    if (clips.empty())
        throw ValidationError("eval: the dataset has no '" + a.split + "' clips");
    check_input_size(clips, model.config().input_size);

    std::vector<ClipPredictions> predictions;
    for (const auto& clip : clips) predictions.push_back(model.predict(clip, nullptr));

    PckConfig cfg;
    cfg.alpha = a.alpha;
    const PckReport report = evaluate(predictions, clips, cfg);
    const std::vector<double> alphas = parse_alphas(a.alphas_csv);
    const std::vector<double> curve = pck_curve(predictions, clips, alphas);

    fs::create_directories(out);
    write_text_file(fs::path(out) / "report.json",
                    report_to_json(report, cfg).dump(2) + "\n");
    const std::string table = report_to_text(report);
    write_text_file(fs::path(out) / "report.txt", table);
    write_text_file(fs::path(out) / "curve.csv", curve_to_csv(alphas, curve));

    std::cout << table << "\nreports written to " << out << "\n";
    return 0;
}

// ---- infer ---------------------------------------------------------------

struct InferArgs {
    std::string checkpoint, dataset, clip_id, out;
    bool overlays = false;
};

void draw_line(Image& img, double x0, double y0, double x1, double y1,
               double width, int r, int g, int b) {
    const double half = width / 2.0;
    const int xa = static_cast<int>(std::floor(std::min(x0, x1) - half - 1));
    const int xb = static_cast<int>(std::ceil(std::max(x0, x1) + half + 1));
    const int ya = static_cast<int>(std::floor(std::min(y0, y1) - half - 1));
    const int yb = static_cast<int>(std::ceil(std::max(y0, y1) + half + 1));
    const double dx = x1 - x0, dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    const double rgb[3] = {static_cast<double>(r), static_cast<double>(g),
                           static_cast<double>(b)};
    for (int y = ya; y <= yb; ++y)
        for (int x = xa; x <= xb; ++x) {
            if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
            double t = len2 > 0.0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double d = std::hypot(x - (x0 + t * dx), y - (y0 + t * dy));
            const double alpha = std::clamp(half + 0.5 - d, 0.0, 1.0);
            if (alpha <= 0.0) continue;
            for (int c = 0; c < 3; ++c)
                img.at(y, x, c) = static_cast<uint8_t>(std::lround(
                    std::clamp((1.0 - alpha) * img.at(y, x, c) + alpha * rgb[c], 0.0, 255.0)));
        }
}

/// Skeleton overlay; left-side limbs get a distinct warm stroke.
void draw_overlay(Image& img, const Pose& pose) {
    const auto seg = [&](JointId a, JointId b, int r, int g, int bl) {
        draw_line(img, pose[a].x, pose[a].y, pose[b].x, pose[b].y, 1.6, r, g, bl);
    };
    // torso + head, neutral
    seg(JointId::head, JointId::neck, 235, 235, 235);
    seg(JointId::neck, JointId::left_shoulder, 235, 235, 235);
    seg(JointId::neck, JointId::right_shoulder, 235, 235, 235);
    seg(JointId::left_shoulder, JointId::left_hip, 235, 235, 235);
    seg(JointId::right_shoulder, JointId::right_hip, 235, 235, 235);
    seg(JointId::left_hip, JointId::right_hip, 235, 235, 235);
    // right side, cool
    seg(JointId::right_shoulder, JointId::right_elbow, 70, 120, 235);
    seg(JointId::right_elbow, JointId::right_wrist, 70, 120, 235);
    seg(JointId::right_hip, JointId::right_knee, 70, 120, 235);
    seg(JointId::right_knee, JointId::right_ankle, 70, 120, 235);
    // left side, warm
    seg(JointId::left_shoulder, JointId::left_elbow, 245, 200, 50);
    seg(JointId::left_elbow, JointId::left_wrist, 245, 200, 50);
    seg(JointId::left_hip, JointId::left_knee, 245, 200, 50);
    seg(JointId::left_knee, JointId::left_ankle, 245, 200, 50);
}

int cmd_infer(InferArgs& a) {
    if (a.checkpoint.empty()) throw ValidationError("infer: no checkpoint given");
    if (a.clip_id.empty()) throw ValidationError("infer: no clip id given (--clip)");
    const std::string out = default_out(a.out, "infer");
    const LoadedModel model = load_model(a.checkpoint);

    const Dataset ds = load_dataset(resolve_manifest(a.dataset), true);
    const VideoClip* clip = nullptr;
    for (const auto& c : ds.clips)
        if (c.clip_id == a.clip_id) clip = &c;
    if (!clip) throw ValidationError("infer: dataset has no clip '" + a.clip_id + "'");
    check_input_size({*clip}, model.config().input_size);

    ClipConfidences conf;
    const ClipPredictions pred = model.predict(*clip, &conf);

    fs::create_directories(out);
    std::ofstream jsonl(fs::path(out) / "predictions.jsonl");
    if (!jsonl) throw ValidationError("infer: cannot write predictions under '" + out + "'");
    for (int t = 1; t <= static_cast<int>(pred.poses.size()); ++t) {
        nlohmann::ordered_json rec;
        rec["clip_id"] = pred.clip_id;
        rec["frame_index"] = t;
        auto& joints = rec["joints"] = nlohmann::ordered_json::array();
        for (const Joint& j : pred.poses[t - 1].joints) joints.push_back({j.x, j.y});
        auto& confidence = rec["confidence"] = nlohmann::ordered_json::array();
        for (double c : conf.per_frame[t - 1]) confidence.push_back(c);
        jsonl << rec.dump() << "\n";
    }

    if (a.overlays) {
        const fs::path overlay_dir = fs::path(out) / "overlays";
        fs::create_directories(overlay_dir);
        for (int t = 1; t <= clip->length(); ++t) {
            Image frame = clip->frames[t - 1];
            draw_overlay(frame, pred.poses[t - 1]);
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%04d.png", t);
            write_png((overlay_dir / name).string(), frame);
        }
    }

    std::cout << pred.poses.size() << " predictions written to " << out << "\n";
    return 0;
}

// ---- plot ----------------------------------------------------------------

struct PlotArgs {
    std::vector<std::string> reports;  // label=report.json
    std::vector<std::string> curves;   // label=curve.csv
    std::string k_sweep;               // k=report.json,k=report.json,...
    std::string out;
};

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a045", "#b07aa1",
                          "#e15759", "#76b7b2"};

std::pair<std::string, std::string> split_labeled(const std::string& arg,
                                                  const char* what) {
    const size_t eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
        throw ValidationError(std::string("plot: ") + what + " wants label=path, got '" +
                              arg + "'");
    return {arg.substr(0, eq), arg.substr(eq + 1)};
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("plot: cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("plot: '" + path + "' is not valid JSON: " + e.what());
    }
}

struct SvgCanvas {
    static constexpr int kW = 640, kH = 400;
    static constexpr double kLeft = 60, kRight = 615, kTop = 35, kBottom = 330;
    std::ostringstream body;

    SvgCanvas(const std::string& title, const std::string& y_label) {
        body << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
             << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
             << "\" font-family=\"sans-serif\">\n"
             << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n"
             << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" "
                "font-size=\"14\">" << title << "</text>\n"
             << "<text x=\"16\" y=\"" << (kTop + kBottom) / 2
             << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 16 "
             << (kTop + kBottom) / 2 << ")\">" << y_label << "</text>\n";
    }

    double y_of(double v, double lo, double hi) const {
        return kBottom - (v - lo) / (hi - lo) * (kBottom - kTop);
    }

    void y_axis(double lo, double hi, double step) {
        for (double v = lo; v <= hi + 1e-9; v += step) {
            const double y = y_of(v, lo, hi);
            body << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kRight
                 << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n"
                 << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
                 << "\" text-anchor=\"end\" font-size=\"11\">" << v << "</text>\n";
        }
        body << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
             << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n"
             << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
             << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
    }

    void legend(const std::vector<std::string>& labels) {
        double y = kTop + 4;
        for (size_t i = 0; i < labels.size(); ++i, y += 18) {
            body << "<rect x=\"" << kRight - 150 << "\" y=\"" << y - 9
                 << "\" width=\"12\" height=\"12\" fill=\""
                 << kPalette[i % std::size(kPalette)] << "\"/>\n"
                 << "<text x=\"" << kRight - 133 << "\" y=\"" << y + 2
                 << "\" font-size=\"11\">" << labels[i] << "</text>\n";
        }
    }

    std::string finish() {
        body << "</svg>\n";
        return body.str();
    }
};

void plot_bars(const std::vector<std::pair<std::string, std::string>>& reports,
               const fs::path& out) {
    std::vector<std::string> labels;
    std::vector<std::array<double, kNumStyles + 1>> values;
    for (const auto& [label, path] : reports) {
        const nlohmann::json j = read_json_file(path);
        std::array<double, kNumStyles + 1> row{};
        try {
            for (int s = 0; s < kNumStyles; ++s)
                row[s] = j.at("per_style").at(style_name(static_cast<StyleLabel>(s)))
                             .get<double>();
            row[kNumStyles] = j.at("overall").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("plot: '" + path + "' is not an evaluation report: " +
                                  e.what());
        }
        labels.push_back(label);
        values.push_back(row);
    }

    SvgCanvas svg("PCK@0.2 by style", "PCK [%]");
    svg.y_axis(0, 100, 20);
    const int cats = kNumStyles + 1;
    const double cw = (SvgCanvas::kRight - SvgCanvas::kLeft) / cats;
    const double bw = std::min(26.0, (cw - 16) / values.size());
    for (int c = 0; c < cats; ++c) {
        const std::string name =
            c < kNumStyles ? style_name(static_cast<StyleLabel>(c)) : "combined";
        const double x0 = SvgCanvas::kLeft + c * cw;
        svg.body << "<text x=\"" << x0 + cw / 2 << "\" y=\"" << SvgCanvas::kBottom + 16
                 << "\" text-anchor=\"middle\" font-size=\"11\">" << name << "</text>\n";
        for (size_t i = 0; i < values.size(); ++i) {
            const double v = values[i][c];
            const double x = x0 + 8 + i * bw;
            const double y = svg.y_of(v, 0, 100);
            svg.body << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bw - 3
                     << "\" height=\"" << SvgCanvas::kBottom - y << "\" fill=\""
                     << kPalette[i % std::size(kPalette)] << "\"/>\n";
            char txt[16];
            std::snprintf(txt, sizeof(txt), "%.1f", v);
            svg.body << "<text x=\"" << x + (bw - 3) / 2 << "\" y=\"" << y - 3
                     << "\" text-anchor=\"middle\" font-size=\"9\">" << txt
                     << "</text>\n";
        }
    }
    svg.legend(labels);
    write_text_file(out, svg.finish());
}

void plot_curves(const std::vector<std::pair<std::string, std::string>>& curves,
                 const fs::path& out) {
    std::vector<std::string> labels;
    std::vector<std::vector<std::pair<double, double>>> series;
    double xmax = 0.0;
    for (const auto& [label, path] : curves) {
        std::ifstream in(path);
        if (!in) throw ValidationError("plot: cannot open '" + path + "'");
        std::vector<std::pair<double, double>> pts;
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const size_t comma = line.find(',');
            if (comma == std::string::npos)
                throw ValidationError("plot: '" + path + "' is not an alpha,pck CSV");
            try {
                pts.emplace_back(std::stod(line.substr(0, comma)),
                                 std::stod(line.substr(comma + 1)));
            } catch (const std::exception&) {
                throw ValidationError("plot: bad CSV row '" + line + "' in '" + path + "'");
            }
            xmax = std::max(xmax, pts.back().first);
        }
        if (pts.empty()) throw ValidationError("plot: '" + path + "' has no data rows");
        labels.push_back(label);
        series.push_back(std::move(pts));
    }

    SvgCanvas svg("PCK vs threshold", "PCK [%]");
    svg.y_axis(0, 100, 20);
    const auto x_of = [&](double a) {
        return SvgCanvas::kLeft +
               (xmax > 0 ? a / xmax : 0.0) * (SvgCanvas::kRight - SvgCanvas::kLeft);
    };
    for (int i = 0; i <= 5; ++i) {
        const double a = xmax * i / 5.0;
        char txt[16];
        std::snprintf(txt, sizeof(txt), "%.2f", a);
        svg.body << "<text x=\"" << x_of(a) << "\" y=\"" << SvgCanvas::kBottom + 16
                 << "\" text-anchor=\"middle\" font-size=\"11\">" << txt << "</text>\n";
    }
    svg.body << "<text x=\"" << (SvgCanvas::kLeft + SvgCanvas::kRight) / 2 << "\" y=\""
             << SvgCanvas::kBottom + 34 << "\" text-anchor=\"middle\" font-size=\"11\">"
             << "alpha</text>\n";
    for (size_t i = 0; i < series.size(); ++i) {
        svg.body << "<polyline fill=\"none\" stroke=\""
                 << kPalette[i % std::size(kPalette)] << "\" stroke-width=\"2\" points=\"";
        for (const auto& [a, v] : series[i])
            svg.body << x_of(a) << "," << svg.y_of(v, 0, 100) << " ";
        svg.body << "\"/>\n";
    }
    svg.legend(labels);
    write_text_file(out, svg.finish());
}

void plot_k_sweep(const std::string& spec, const fs::path& out) {
    std::vector<std::pair<double, double>> pts;  // (k, overall)
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto [k_str, path] = split_labeled(tok, "--k-sweep");
        double k = 0.0;
        try {
            k = std::stod(k_str);
        } catch (const std::exception&) {
            throw ValidationError("plot: bad k value '" + k_str + "'");
        }
        const nlohmann::json j = read_json_file(path);
        if (!j.contains("overall"))
            throw ValidationError("plot: '" + path + "' is not an evaluation report");
        pts.emplace_back(k, j.at("overall").get<double>());
    }
    if (pts.empty()) throw ValidationError("plot: --k-sweep has no entries");
    std::sort(pts.begin(), pts.end());

    SvgCanvas svg("PCK vs temporal span", "PCK [%]");
    svg.y_axis(0, 100, 20);
    const double kmax = std::max(1.0, pts.back().first);
    const auto x_of = [&](double k) {
        return SvgCanvas::kLeft + k / kmax * (SvgCanvas::kRight - SvgCanvas::kLeft - 20);
    };
    svg.body << "<polyline fill=\"none\" stroke=\"" << kPalette[0]
             << "\" stroke-width=\"2\" points=\"";
    for (const auto& [k, v] : pts) svg.body << x_of(k) << "," << svg.y_of(v, 0, 100) << " ";
    svg.body << "\"/>\n";
    for (const auto& [k, v] : pts) {
        svg.body << "<circle cx=\"" << x_of(k) << "\" cy=\"" << svg.y_of(v, 0, 100)
                 << "\" r=\"3.5\" fill=\"" << kPalette[0] << "\"/>\n"
                 << "<text x=\"" << x_of(k) << "\" y=\"" << SvgCanvas::kBottom + 16
                 << "\" text-anchor=\"middle\" font-size=\"11\">" << k << "</text>\n";
        char txt[16];
        std::snprintf(txt, sizeof(txt), "%.1f", v);
        svg.body << "<text x=\"" << x_of(k) << "\" y=\"" << svg.y_of(v, 0, 100) - 8
                 << "\" text-anchor=\"middle\" font-size=\"9\">" << txt << "</text>\n";
    }
    svg.body << "<text x=\"" << (SvgCanvas::kLeft + SvgCanvas::kRight) / 2 << "\" y=\""
             << SvgCanvas::kBottom + 34 << "\" text-anchor=\"middle\" font-size=\"11\">"
             << "temporal span k [frames]</text>\n";
    write_text_file(out, svg.finish());
}

int cmd_plot(PlotArgs& a) {
    if (a.reports.empty() && a.curves.empty() && a.k_sweep.empty())
        throw ValidationError("plot: nothing to plot (--report / --curve / --k-sweep)");
    const fs::path out(default_out(a.out, "plot"));
    fs::create_directories(out);

    const auto labeled = [](const std::vector<std::string>& args, const char* what) {
        std::vector<std::pair<std::string, std::string>> items;
        for (const auto& arg : args) items.push_back(split_labeled(arg, what));
        return items;
    };
    if (!a.reports.empty()) plot_bars(labeled(a.reports, "--report"), out / "bars.svg");
    if (!a.curves.empty()) plot_curves(labeled(a.curves, "--curve"), out / "curve.svg");
    if (!a.k_sweep.empty()) plot_k_sweep(a.k_sweep, out / "pck_vs_k.svg");
    std::cout << "plots written to " << out.string() << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"activity-conditioned pose estimation toolkit"};
    app.require_subcommand(1);

    SynthArgs synth;
    CLI::App* s = app.add_subcommand("synth", "generate a synthetic dataset");
    s->add_option("--out", synth.out, "dataset directory");
    s->add_option("--seed", synth.cfg.seed, "dataset seed");
    s->add_option("--clips-per-style", synth.cfg.clips_per_style,
                  "clips per style (last one is the test clip)");
    s->add_option("--frames", synth.cfg.frames_per_clip, "frames per clip");
    s->add_option("--image-size", synth.cfg.image_size, "square frame size in pixels");
    s->add_option("--period", synth.cfg.period, "motion cycle length in frames");
    s->add_option("--occlusion-rate", synth.cfg.occlusion_rate,
                  "fraction of each cycle a limb group is hidden");
    s->add_option("--noise-level", synth.cfg.noise_level, "additive pixel noise level");
    s->add_option("--styles", synth.styles_csv, "comma-separated style subset");

    TrainArgs train;
    CLI::App* t = app.add_subcommand("train", "train an estimator or temporal phase");
    train.sub = t;
    t->add_option("--config", train.config_file, "run config JSON (flags override it)");
    t->add_option("--mode", train.rc.mode,
                  "baseline | conditioned-once | conditioned-repeated | "
                  "temporal-phase1 | temporal-phase2");
    t->add_option("--dataset", train.rc.dataset, "dataset directory or manifest");
    t->add_option("--out", train.rc.output_dir, "output directory");
    t->add_option("--lr", train.rc.learning_rate, "Adam learning rate");
    t->add_option("--iterations", train.rc.iterations, "training iterations");
    t->add_option("--batch-size", train.rc.batch_size, "frames per iteration");
    t->add_option("--seed", train.rc.seed, "training seed");
    t->add_option("--grad-clip", train.rc.grad_clip, "global gradient-norm clip (<=0 off)");
    t->add_option("--init-checkpoint", train.rc.init_checkpoint,
                  "estimator (phase 1) or phase-1 (phase 2) checkpoint");
    t->add_option("--stages", train.rc.model.num_stages, "estimator stages");
    t->add_option("--input-size", train.rc.model.input_size, "input image size");
    t->add_option("--heatmap-size", train.rc.model.heatmap_size, "heatmap grid size");
    t->add_option("--sigma", train.rc.model.gaussian_sigma, "target Gaussian sigma (cells)");
    t->add_option("--channel-mult", train.rc.model.channel_mult, "channel width multiplier");
    t->add_option("--first-conditioned-stage", train.rc.model.first_conditioned_stage,
                  "first stage that receives label maps");
    int temporal_l = 7;
    t->add_option("--temporal-l", temporal_l, "temporal half-window l (k = 4l+1)")
        ->check(CLI::NonNegativeNumber);

    EvalArgs eval;
    CLI::App* e = app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
    e->add_option("--checkpoint", eval.checkpoint, "model checkpoint")->required();
    e->add_option("--dataset", eval.dataset, "dataset directory or manifest")->required();
    e->add_option("--out", eval.out, "output directory");
    e->add_option("--split", eval.split, "dataset split to score (default test)");
    e->add_option("--alpha", eval.alpha, "PCK threshold fraction for the report");
    e->add_option("--alphas", eval.alphas_csv, "comma-separated thresholds for the curve");

    InferArgs infer;
    CLI::App* i = app.add_subcommand("infer", "predict poses for one clip");
    i->add_option("--checkpoint", infer.checkpoint, "model checkpoint")->required();
    i->add_option("--dataset", infer.dataset, "dataset directory or manifest")->required();
    i->add_option("--clip", infer.clip_id, "clip id to process")->required();
    i->add_option("--out", infer.out, "output directory");
    i->add_flag("--overlays", infer.overlays, "also write skeleton overlay PNGs");

    PlotArgs plot;
    CLI::App* p = app.add_subcommand("plot", "render SVG charts from stored results");
    p->add_option("--report", plot.reports, "label=report.json (repeatable)");
    p->add_option("--curve", plot.curves, "label=curve.csv (repeatable)");
    p->add_option("--k-sweep", plot.k_sweep, "k=report.json,k=report.json,...");
    p->add_option("--out", plot.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (s->parsed()) return cmd_synth(synth);
        if (t->parsed()) {
            if (t->count("--temporal-l") > 0)
                train.rc.model.seq_spec = SequenceSpec{temporal_l};
            return cmd_train(train);
        }
        if (e->parsed()) return cmd_eval(eval);
        if (i->parsed()) return cmd_infer(infer);
        if (p->parsed()) return cmd_plot(plot);
    } catch (const ValidationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "unexpected failure: " << err.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace swimpose
