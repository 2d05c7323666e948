// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/scenario.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <ucsl/rng.hpp>

#include <json.hpp>

namespace ucsl {

namespace {

void validate(const ScenarioSpec& spec) {
    if (spec.num_identities < 1) {
        throw InvalidSpecError("num_identities must be >= 1");
    }
    if (spec.num_frames < 1) {
        throw InvalidSpecError("num_frames must be >= 1");
    }
    if (spec.embed_dim < 2) {
        throw InvalidSpecError("embed_dim must be >= 2");
    }
    if (spec.embed_noise < 0.0) {
        throw InvalidSpecError("embed_noise must be >= 0");
    }
    if (spec.arena.width <= 0.0 || spec.arena.height <= 0.0) {
        throw InvalidSpecError("arena dimensions must be positive");
    }
    if (!spec.lifespans.empty() &&
        spec.lifespans.size() != static_cast<std::size_t>(spec.num_identities)) {
        throw InvalidSpecError("lifespans must list every identity or none");
    }
    for (const Lifespan& l : spec.lifespans) {
        if (l.birth < 0 || l.death >= spec.num_frames || l.birth > l.death) {
            throw InvalidSpecError("lifespan outside [0, num_frames) or birth > death");
        }
    }
    for (const OcclusionEvent& e : spec.occlusion_events) {
        if (e.victim == e.occluder) {
            throw InvalidSpecError("occlusion event: victim equals occluder");
        }
        if (e.victim < 0 || e.victim >= spec.num_identities || e.occluder < 0 ||
            e.occluder >= spec.num_identities) {
            throw InvalidSpecError("occlusion event: identity out of range");
        }
        if (e.start < 0 || e.end >= spec.num_frames || e.start > e.end) {
            throw InvalidSpecError("occlusion event: frames outside [0, num_frames)");
        }
        if (e.alpha < 0.0 || e.alpha > 1.0) {
            throw InvalidSpecError("occlusion event: alpha outside [0, 1]");
        }
    }
}

double reflect(double v, double lo, double hi, double& velocity) {
    while (v < lo || v > hi) {
        if (v < lo) {
            v = 2.0 * lo - v;
        } else {
            v = 2.0 * hi - v;
        }
        velocity = -velocity;
    }
    return v;
}

struct Body {
    double cx, cy, vx, vy, w, h;
};

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
    validate(spec);
    SeededRng rng(spec.seed);

    const int n = spec.num_identities;
    const int dim = spec.embed_dim;

    std::vector<Eigen::VectorXd> latents;
    latents.reserve(n);
    for (int i = 0; i < n; ++i) {
        latents.push_back(rng.unit_vector(dim));
    }

    std::vector<Body> bodies(n);
    for (int i = 0; i < n; ++i) {
        Body& b = bodies[i];
        b.w = rng.uniform(0.03, 0.07) * spec.arena.width;
        b.h = rng.uniform(0.06, 0.14) * spec.arena.height;
        b.cx = rng.uniform(0.5 * b.w, spec.arena.width - 0.5 * b.w);
        b.cy = rng.uniform(0.5 * b.h, spec.arena.height - 0.5 * b.h);
        b.vx = rng.uniform(-0.015, 0.015) * spec.arena.width;
        b.vy = rng.uniform(-0.015, 0.015) * spec.arena.height;
    }

    auto lifespan_of = [&](int i) {
        return spec.lifespans.empty() ? Lifespan{0, spec.num_frames - 1} : spec.lifespans[i];
    };
    auto active_event = [&](int identity, int frame) -> const OcclusionEvent* {
        for (const OcclusionEvent& e : spec.occlusion_events) {
            if (e.victim == identity && e.start <= frame && frame <= e.end) {
                return &e;
            }
        }
        return nullptr;
    };

    Scenario out;
    out.truth.frames.resize(spec.num_frames);
    out.detections.resize(spec.num_frames);

    for (int t = 0; t < spec.num_frames; ++t) {
        if (t > 0) {
            for (Body& b : bodies) {
                b.cx = reflect(b.cx + b.vx, 0.5 * b.w, spec.arena.width - 0.5 * b.w, b.vx);
                b.cy = reflect(b.cy + b.vy, 0.5 * b.h, spec.arena.height - 0.5 * b.h, b.vy);
            }
        }
        for (int i = 0; i < n; ++i) {
            const Lifespan life = lifespan_of(i);
            if (t < life.birth || t > life.death) {
                continue;
            }
            const Body& b = bodies[i];
            const Box box{b.cx - 0.5 * b.w, b.cy - 0.5 * b.h, b.w, b.h};

            const Eigen::VectorXd noise = rng.normal_vector(dim);
            const double u = rng.uniform01();
            const OcclusionEvent* event = active_event(i, t);

            Eigen::VectorXd base = latents[i];
            if (event != nullptr) {
                base = event->alpha * latents[i] + (1.0 - event->alpha) * latents[event->occluder];
            }
            Eigen::VectorXd emb = base + spec.embed_noise * noise;
            const double norm = emb.norm();
            emb = norm > 1e-12 ? Eigen::VectorXd(emb / norm) : latents[i];

            Detection det;
            det.frame = t + 1;
            det.box = box;
            det.confidence = event != nullptr ? 0.55 + 0.3 * u : 0.85 + 0.14 * u;
            det.embedding = std::move(emb);

            out.truth.frames[t].push_back(GtEntry{i, box, event == nullptr});
            out.detections[t].push_back(std::move(det));
        }
    }
    return out;
}

FrameTriple frame_batch(const std::vector<std::vector<Detection>>& detections, int t,
                        int interval) {
    if (interval < 1) {
        throw OutOfRangeError("frame_batch: interval must be >= 1");
    }
    if (t - 2 * interval < 0 || t >= static_cast<int>(detections.size())) {
        throw OutOfRangeError("frame_batch: triple (" + std::to_string(t - 2 * interval) + ", " +
                              std::to_string(t - interval) + ", " + std::to_string(t) +
                              ") out of range");
    }
    FrameTriple triple;
    const int frames[3] = {t - 2 * interval, t - interval, t};
    for (int f = 0; f < 3; ++f) {
        const std::vector<Detection>& dets = detections[frames[f]];
        const int dim = dets.empty() ? 0 : static_cast<int>(dets.front().embedding.size());
        Eigen::MatrixXd m(dim, static_cast<int>(dets.size()));
        for (std::size_t j = 0; j < dets.size(); ++j) {
            m.col(static_cast<int>(j)) = dets[j].embedding;
        }
        triple[f] = EmbeddingMatrix(std::move(m));
    }
    return triple;
}

namespace {

using nlohmann::json;

constexpr int kSpecVersion = 1;

}  // namespace

ScenarioSpec scenario_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidSpecError(std::string("scenario spec is not valid JSON: ") + e.what());
    }
    try {
        if (j.value("version", kSpecVersion) != kSpecVersion) {
            throw InvalidSpecError("unsupported scenario spec version");
        }
        ScenarioSpec spec;
        spec.seed = j.value("seed", spec.seed);
        spec.num_identities = j.value("num_identities", spec.num_identities);
        spec.num_frames = j.value("num_frames", spec.num_frames);
        if (j.contains("arena")) {
            spec.arena.width = j["arena"].value("width", spec.arena.width);
            spec.arena.height = j["arena"].value("height", spec.arena.height);
        }
        spec.embed_dim = j.value("embed_dim", spec.embed_dim);
        spec.embed_noise = j.value("embed_noise", spec.embed_noise);
        for (const json& e : j.value("occlusion_events", json::array())) {
            OcclusionEvent ev;
            ev.victim = e.at("victim").get<int>();
            ev.occluder = e.at("occluder").get<int>();
            ev.start = e.at("start").get<int>();
            ev.end = e.at("end").get<int>();
            ev.alpha = e.at("alpha").get<double>();
            spec.occlusion_events.push_back(ev);
        }
        if (j.contains("lifespans")) {
            spec.lifespans.assign(static_cast<std::size_t>(spec.num_identities),
                                  Lifespan{0, spec.num_frames - 1});
            for (const json& l : j["lifespans"]) {
                const int id = l.at("identity").get<int>();
                if (id < 0 || id >= spec.num_identities) {
                    throw InvalidSpecError("lifespans: identity out of range");
                }
                spec.lifespans[static_cast<std::size_t>(id)] =
                    Lifespan{l.at("birth").get<int>(), l.at("death").get<int>()};
            }
        }
        return spec;
    } catch (const json::exception& e) {
        throw InvalidSpecError(std::string("scenario spec field error: ") + e.what());
    }
}

std::string scenario_spec_to_json(const ScenarioSpec& spec) {
    json j;
    j["version"] = kSpecVersion;
    j["seed"] = spec.seed;
    j["num_identities"] = spec.num_identities;
    j["num_frames"] = spec.num_frames;
    j["arena"] = {{"width", spec.arena.width}, {"height", spec.arena.height}};
    j["embed_dim"] = spec.embed_dim;
    j["embed_noise"] = spec.embed_noise;
    j["occlusion_events"] = json::array();
    for (const OcclusionEvent& e : spec.occlusion_events) {
        j["occlusion_events"].push_back({{"victim", e.victim},
                                         {"occluder", e.occluder},
                                         {"start", e.start},
                                         {"end", e.end},
                                         {"alpha", e.alpha}});
    }
    j["lifespans"] = json::array();
    for (std::size_t i = 0; i < spec.lifespans.size(); ++i) {
        j["lifespans"].push_back({{"identity", static_cast<int>(i)},
                                  {"birth", spec.lifespans[i].birth},
                                  {"death", spec.lifespans[i].death}});
    }
    return j.dump(2) + "\n";
}

ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_spec_from_json(buf.str());
}

void save_scenario_spec(const ScenarioSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << scenario_spec_to_json(spec);
}

std::vector<MotRecord> ground_truth_records(const GroundTruth& truth) {
    std::vector<MotRecord> records;
    for (std::size_t t = 0; t < truth.frames.size(); ++t) {
        for (const GtEntry& e : truth.frames[t]) {
            MotRecord r;
            r.frame = static_cast<int>(t) + 1;
            r.id = e.identity + 1;
            r.bb_left = e.box.x;
            r.bb_top = e.box.y;
            r.bb_width = e.box.w;
            r.bb_height = e.box.h;
            r.conf = 1.0;
            records.push_back(r);
        }
    }
    return records;
}

std::vector<Detection> flatten_detections(const std::vector<std::vector<Detection>>& per_frame) {
    std::vector<Detection> out;
    for (const auto& frame : per_frame) {
        out.insert(out.end(), frame.begin(), frame.end());
    }
    return out;
}

}  // namespace ucsl
