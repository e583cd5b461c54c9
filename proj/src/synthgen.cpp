#include "swimpose/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace swimpose {

namespace {

constexpr double kPi = 3.14159265358979323846;

// splitmix64; decorrelates per-clip seeds derived from the dataset seed.
uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// One rotating limb segment pair: segment angle base + amp*sin(theta + phase),
// distal bend added on top of the proximal angle.
struct LimbMotion {
    double base, amp, phase;
    double bend_base, bend_amp, bend_phase;

    double angle(double theta) const { return base + amp * std::sin(theta + phase); }
    double bend(double theta) const {
        return bend_base + bend_amp * std::sin(theta + bend_phase);
    }
};

// Right-limb motion shared by the anti-symmetric family; the left limbs are
// the same waveforms half a cycle out of phase, and freestyle additionally
// offsets the left angles by fixed amounts so the two styles' left-limb
// ground truth stays separated at every phase.
const LimbMotion kAntiArmR{1.9, 0.9, 0.0, 0.5, 0.3, kPi / 2 - 0.7};
const LimbMotion kAntiLegR{kPi, 0.45, kPi / 2, 0.3, 0.25, kPi - 0.8};
const LimbMotion kBackArmL{1.9, 0.9, kPi, 0.5, 0.3, 3 * kPi / 2 - 0.7};
const LimbMotion kBackLegL{kPi, 0.45, 3 * kPi / 2, 0.3, 0.25, 2 * kPi - 0.8};
const LimbMotion kFreeArmL{0.5, 0.9, kPi, -0.5, 0.3, 3 * kPi / 2 - 0.7};
const LimbMotion kFreeLegL{kPi - 1.2, 0.45, 3 * kPi / 2, 1.1, 0.25, 2 * kPi - 0.8};

// Symmetric family: legs shared between the two styles, arms distinct.
const LimbMotion kSymLeg{kPi, 0.5, kPi / 2, 0.35, 0.3, kPi - 0.9};
const LimbMotion kBreastArm{2.2, 0.55, 0.0, 0.9, 0.4, kPi / 2 - 0.5};
const LimbMotion kFlyArm{1.6, 1.05, 0.0, 0.2, 0.3, kPi / 2 - 0.3};

struct Proportions {
    double shoulder_x = 0.14, hip_x = -0.14;  // relative to body center, x forward
    double neck_x = 0.17, head_x = 0.31, head_y = -0.02;
    double upper = 0.11, lower = 0.11;  // limb segment lengths
    double depth = 0.025;               // left/right lane offset, anti family only
    double bob = 0.02;                  // vertical body oscillation
};

void place_limb(Pose& pose, JointId mid, JointId tip, double ax, double ay,
                const LimbMotion& m, double theta, double len) {
    const double a1 = m.angle(theta);
    const double mx = ax + len * std::cos(a1);
    const double my = ay + len * std::sin(a1);
    const double a2 = a1 + m.bend(theta);
    pose[mid] = {mx, my, true};
    pose[tip] = {mx + len * std::cos(a2), my + len * std::sin(a2), true};
}

Pose make_pose(StyleLabel style, double theta, int n) {
    const Proportions P;
    const double cx = 0.5 * n;
    const double cy = 0.5 * n + P.bob * n * std::sin(theta);
    const bool symmetric = is_symmetric_style(style);
    const double d = symmetric ? 0.0 : P.depth * n;

    Pose pose;
    pose[JointId::head] = {cx + P.head_x * n, cy + P.head_y * n, true};
    pose[JointId::neck] = {cx + P.neck_x * n, cy, true};
    pose[JointId::left_shoulder] = {cx + P.shoulder_x * n, cy - d, true};
    pose[JointId::right_shoulder] = {cx + P.shoulder_x * n, cy + d, true};
    pose[JointId::left_hip] = {cx + P.hip_x * n, cy - d, true};
    pose[JointId::right_hip] = {cx + P.hip_x * n, cy + d, true};

    const double len = P.upper * n;
    const auto arm = [&](JointId s, JointId e, JointId w, const LimbMotion& m) {
        place_limb(pose, e, w, pose[s].x, pose[s].y, m, theta, len);
    };
    const auto leg = [&](JointId h, JointId k, JointId a, const LimbMotion& m) {
        place_limb(pose, k, a, pose[h].x, pose[h].y, m, theta, len);
    };

    switch (style) {
        case StyleLabel::backstroke:
            arm(JointId::right_shoulder, JointId::right_elbow, JointId::right_wrist, kAntiArmR);
            leg(JointId::right_hip, JointId::right_knee, JointId::right_ankle, kAntiLegR);
            arm(JointId::left_shoulder, JointId::left_elbow, JointId::left_wrist, kBackArmL);
            leg(JointId::left_hip, JointId::left_knee, JointId::left_ankle, kBackLegL);
            break;
        case StyleLabel::freestyle:
            arm(JointId::right_shoulder, JointId::right_elbow, JointId::right_wrist, kAntiArmR);
            leg(JointId::right_hip, JointId::right_knee, JointId::right_ankle, kAntiLegR);
            arm(JointId::left_shoulder, JointId::left_elbow, JointId::left_wrist, kFreeArmL);
            leg(JointId::left_hip, JointId::left_knee, JointId::left_ankle, kFreeLegL);
            break;
        case StyleLabel::breaststroke:
        case StyleLabel::butterfly: {
            const LimbMotion& a = style == StyleLabel::breaststroke ? kBreastArm : kFlyArm;
            arm(JointId::right_shoulder, JointId::right_elbow, JointId::right_wrist, a);
            leg(JointId::right_hip, JointId::right_knee, JointId::right_ankle, kSymLeg);
            // Paired joints share coordinates: copy the right side verbatim.
            pose[JointId::left_elbow] = pose[JointId::right_elbow];
            pose[JointId::left_wrist] = pose[JointId::right_wrist];
            pose[JointId::left_knee] = pose[JointId::right_knee];
            pose[JointId::left_ankle] = pose[JointId::right_ankle];
            break;
        }
    }
    return pose;
}

// --- rendering ------------------------------------------------------------

struct Rgb {
    double r, g, b;
};

const Rgb kBody{190, 185, 170};
// Swim cap: hue-distinct from every skin tone so the head stays a clean
// landmark even where an arm sweeps past the face.
const Rgb kHead{230, 120, 90};
const Rgb kRightLimb{130, 120, 110};
const Rgb kLeftLimb{240, 235, 220};

void blend(Image& img, int x, int y, const Rgb& c, double a) {
    if (a <= 0.0 || x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    const double rgb[3] = {c.r, c.g, c.b};
    for (int ch = 0; ch < 3; ++ch) {
        const double v = (1.0 - a) * img.at(y, x, ch) + a * rgb[ch];
        img.at(y, x, ch) = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
}

void draw_segment(Image& img, double x0, double y0, double x1, double y1,
                  double width, const Rgb& c) {
    const double half = width / 2.0;
    const int xa = static_cast<int>(std::floor(std::min(x0, x1) - half - 1));
    const int xb = static_cast<int>(std::ceil(std::max(x0, x1) + half + 1));
    const int ya = static_cast<int>(std::floor(std::min(y0, y1) - half - 1));
    const int yb = static_cast<int>(std::ceil(std::max(y0, y1) + half + 1));
    const double dx = x1 - x0, dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    for (int y = ya; y <= yb; ++y)
        for (int x = xa; x <= xb; ++x) {
            double t = len2 > 0.0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double d = std::hypot(x - (x0 + t * dx), y - (y0 + t * dy));
            blend(img, x, y, c, std::clamp(half + 0.5 - d, 0.0, 1.0));
        }
}

void draw_disc(Image& img, double cx, double cy, double r, const Rgb& c) {
    const int xa = static_cast<int>(std::floor(cx - r - 1));
    const int xb = static_cast<int>(std::ceil(cx + r + 1));
    const int ya = static_cast<int>(std::floor(cy - r - 1));
    const int yb = static_cast<int>(std::ceil(cy + r + 1));
    for (int y = ya; y <= yb; ++y)
        for (int x = xa; x <= xb; ++x) {
            const double d = std::hypot(x - cx, y - cy);
            blend(img, x, y, c, std::clamp(r + 0.5 - d, 0.0, 1.0));
        }
}

// Two-octave value noise over a coarse random grid; static per clip.
Image render_background(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const auto grid_noise = [&](int cells) {
        std::vector<double> g(static_cast<size_t>(cells + 1) * (cells + 1));
        for (double& v : g) v = uni(rng);
        return g;
    };
    const auto sample = [n](const std::vector<double>& g, int cells, int x, int y) {
        const double fx = static_cast<double>(x) * cells / n;
        const double fy = static_cast<double>(y) * cells / n;
        const int ix = std::min(static_cast<int>(fx), cells - 1);
        const int iy = std::min(static_cast<int>(fy), cells - 1);
        const double tx = fx - ix, ty = fy - iy;
        const auto at = [&](int gx, int gy) { return g[static_cast<size_t>(gy) * (cells + 1) + gx]; };
        const double top = at(ix, iy) * (1 - tx) + at(ix + 1, iy) * tx;
        const double bot = at(ix, iy + 1) * (1 - tx) + at(ix + 1, iy + 1) * tx;
        return top * (1 - ty) + bot * ty;
    };

    const std::vector<double> coarse = grid_noise(8);
    const std::vector<double> fine = grid_noise(16);

    Image img(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double v =
                0.65 * sample(coarse, 8, x, y) + 0.35 * sample(fine, 16, x, y);
            // Water: dimmer with depth, with a bright surface band up top.
            const double depth = static_cast<double>(y) / n;
            double r = 25 + 35 * v - 12 * depth;
            double g = 55 + 45 * v - 16 * depth;
            double b = 105 + 55 * v - 20 * depth;
            const double band = std::exp(-std::pow((depth - 0.14) / 0.03, 2.0));
            r += 40 * band;
            g += 40 * band;
            b += 35 * band;
            img.at(y, x, 0) = static_cast<uint8_t>(std::lround(std::clamp(r, 0.0, 255.0)));
            img.at(y, x, 1) = static_cast<uint8_t>(std::lround(std::clamp(g, 0.0, 255.0)));
            img.at(y, x, 2) = static_cast<uint8_t>(std::lround(std::clamp(b, 0.0, 255.0)));
        }
    return img;
}

struct Occlusion {
    bool arm = false;  // left arm (anti family) / both arms (symmetric)
    bool leg = false;
};

void apply_occlusion(Pose& pose, StyleLabel style, const Occlusion& occ) {
    const bool sym = is_symmetric_style(style);
    if (occ.arm) {
        pose[JointId::left_elbow].visible = false;
        pose[JointId::left_wrist].visible = false;
        if (sym) {
            pose[JointId::right_elbow].visible = false;
            pose[JointId::right_wrist].visible = false;
        }
    }
    if (occ.leg) {
        pose[JointId::left_knee].visible = false;
        pose[JointId::left_ankle].visible = false;
        if (sym) {
            pose[JointId::right_knee].visible = false;
            pose[JointId::right_ankle].visible = false;
        }
    }
}

void draw_figure(Image& img, const Pose& pose, StyleLabel style, const Occlusion& occ,
                 int n) {
    const double s = n / 64.0;
    const double torso_w = 2.2 * s, limb_w = 1.7 * s, head_r = 3.0 * s;
    const bool sym = is_symmetric_style(style);
    const auto seg = [&](JointId a, JointId b, double w, const Rgb& c) {
        draw_segment(img, pose[a].x, pose[a].y, pose[b].x, pose[b].y, w, c);
    };

    // Back-to-front: right limbs behind the body, left limbs in front.
    if (!(sym && occ.arm)) {
        seg(JointId::right_shoulder, JointId::right_elbow, limb_w, kRightLimb);
        seg(JointId::right_elbow, JointId::right_wrist, limb_w, kRightLimb);
    }
    if (!(sym && occ.leg)) {
        seg(JointId::right_hip, JointId::right_knee, limb_w, kRightLimb);
        seg(JointId::right_knee, JointId::right_ankle, limb_w, kRightLimb);
    }

    seg(JointId::left_shoulder, JointId::right_shoulder, torso_w, kBody);
    seg(JointId::left_hip, JointId::right_hip, torso_w, kBody);
    seg(JointId::left_shoulder, JointId::left_hip, torso_w, kBody);
    seg(JointId::right_shoulder, JointId::right_hip, torso_w, kBody);
    seg(JointId::neck, JointId::left_shoulder, torso_w, kBody);
    seg(JointId::neck, JointId::right_shoulder, torso_w, kBody);
    seg(JointId::head, JointId::neck, torso_w, kBody);

    if (!occ.arm) {
        seg(JointId::left_shoulder, JointId::left_elbow, limb_w, kLeftLimb);
        seg(JointId::left_elbow, JointId::left_wrist, limb_w, kLeftLimb);
    }
    if (!occ.leg) {
        seg(JointId::left_hip, JointId::left_knee, limb_w, kLeftLimb);
        seg(JointId::left_knee, JointId::left_ankle, limb_w, kLeftLimb);
    }

    // The cap breaks the surface above everything else; its annotation is
    // always marked visible, so the render must never cover it either.
    draw_disc(img, pose[JointId::head].x, pose[JointId::head].y, head_r, kHead);
}

VideoClip make_clip(const SynthConfig& cfg, StyleLabel style, int index) {
    const uint64_t clip_seed =
        mix(cfg.seed ^ mix(static_cast<uint64_t>(style) * 64 + index + 1));
    std::mt19937_64 rng(clip_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int offset = static_cast<int>(rng() % cfg.period);
    // Occlusion windows: two antipodal spans per cycle, so the visibility
    // pattern repeats with the phase itself. Anti-symmetric styles hide the
    // whole left side at once (the far side dips underwater together), which
    // keeps the hidden limbs unresolvable from any visible left-side cue;
    // symmetric styles lose arms and legs on separate schedules.
    const double arm_phase = uni(rng) * kPi;
    const double leg_phase = is_symmetric_style(style) ? uni(rng) * kPi : arm_phase;
    const auto occluded_at = [&](double theta, double start) {
        const double local = std::fmod(theta - start + 4 * kPi, kPi);
        return local < cfg.occlusion_rate * kPi;
    };

    const Image background = render_background(rng, cfg.image_size);
    const double sigma = cfg.noise_level * 25.5;

    VideoClip clip;
    clip.clip_id = synth_clip_id(style, index + 1);
    clip.style = style;
    clip.frames.reserve(cfg.frames_per_clip);
    clip.annotations.reserve(cfg.frames_per_clip);

    for (int t = 1; t <= cfg.frames_per_clip; ++t) {
        const int tick = (t - 1 + offset) % cfg.period;
        const double theta = 2 * kPi * tick / cfg.period;

        Pose pose = make_pose(style, theta, cfg.image_size);
        Occlusion occ;
        if (cfg.occlusion_rate > 0.0) {
            occ.arm = occluded_at(theta, arm_phase);
            occ.leg = occluded_at(theta, leg_phase);
        }
        apply_occlusion(pose, style, occ);

        Image frame = background;
        draw_figure(frame, pose, style, occ, cfg.image_size);
        if (sigma > 0.0)
            for (uint8_t& v : frame.rgb)
                v = static_cast<uint8_t>(
                    std::lround(std::clamp(v + sigma * gauss(rng), 0.0, 255.0)));

        clip.frames.push_back(std::move(frame));
        clip.annotations.push_back(pose);
    }
    return clip;
}

}  // namespace

void SynthConfig::validate() const {
    if (period < 4) throw ValidationError("synth: period must be >= 4 frames");
    if (occlusion_rate < 0.0 || occlusion_rate > 1.0)
        throw ValidationError("synth: occlusion_rate must lie in [0, 1]");
    if (image_size < 32) throw ValidationError("synth: image_size must be >= 32");
    if (frames_per_clip < 1) throw ValidationError("synth: frames_per_clip must be >= 1");
    if (clips_per_style < 1) throw ValidationError("synth: clips_per_style must be >= 1");
    if (noise_level < 0.0) throw ValidationError("synth: noise_level must be >= 0");
    if (styles.empty()) throw ValidationError("synth: style set is empty");
}

std::string synth_clip_id(StyleLabel style, int index) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", index);
    return std::string(style_name(style)) + "_" + buf;
}

std::vector<VideoClip> generate(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<VideoClip> clips;
    clips.reserve(cfg.styles.size() * cfg.clips_per_style);
    for (StyleLabel style : cfg.styles)
        for (int i = 0; i < cfg.clips_per_style; ++i)
            clips.push_back(make_clip(cfg, style, i));
    return clips;
}

std::map<std::string, std::string> default_split(const SynthConfig& cfg) {
    std::map<std::string, std::string> split;
    for (StyleLabel style : cfg.styles)
        for (int i = 1; i <= cfg.clips_per_style; ++i)
            split[synth_clip_id(style, i)] =
                i == cfg.clips_per_style && cfg.clips_per_style > 1 ? "test" : "train";
    return split;
}

double max_step_bound(const SynthConfig& cfg) {
    // Worst joint: a wrist at the end of two rotating segments (0.11 + 0.11
    // of the image each, max angular amplitude 1.05 + bend 0.4) plus body
    // bob 0.02 — comfortably below 0.35 per radian of phase.
    return cfg.image_size * (2 * kPi / cfg.period) * 0.35;
}

}  // namespace swimpose
