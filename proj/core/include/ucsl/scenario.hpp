// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <ucsl/detection.hpp>
#include <ucsl/embedding.hpp>
#include <ucsl/mot_io.hpp>

namespace ucsl {

/// While active, the victim's embedding is drawn around
/// alpha * latent(victim) + (1 - alpha) * latent(occluder); alpha = 1 leaves
/// the victim untouched. Frames start..end inclusive.
struct OcclusionEvent {
    int victim = 0;
    int occluder = 0;
    int start = 0;
    int end = 0;
    double alpha = 0.5;
};

/// Inclusive frame range an identity exists in.
struct Lifespan {
    int birth = 0;
    int death = 0;
};

struct ArenaSize {
    double width = 100.0;
    double height = 100.0;
};

/// Deterministic description of a synthetic multi-object scenario. The whole
/// output stream (boxes, embeddings, confidences) is a pure function of this
/// struct. Serialized as versioned JSON; see the README for the schema.
struct ScenarioSpec {
    std::uint64_t seed = 1;
    int num_identities = 1;
    int num_frames = 1;
    ArenaSize arena;
    int embed_dim = 128;
    double embed_noise = 0.0;
    std::vector<OcclusionEvent> occlusion_events;
    std::vector<Lifespan> lifespans;  // empty = every identity spans all frames
};

struct GtEntry {
    int identity = 0;  // 0-based
    Box box;
    bool visible = true;  // false while an occlusion event targets the identity
};

struct GroundTruth {
    std::vector<std::vector<GtEntry>> frames;
};

struct Scenario {
    GroundTruth truth;
    std::vector<std::vector<Detection>> detections;  // per frame, identity order
};

/// Identities move on constant-velocity paths reflecting off the arena walls;
/// per-frame embeddings are the identity latent plus isotropic Gaussian noise,
/// re-normalized. Throws InvalidSpecError with the offending field.
Scenario generate(const ScenarioSpec& spec);

/// Embedding matrices of frames (t - 2g, t - g, t) assembled in detection
/// order; t and g index the per-frame vector. Throws OutOfRangeError.
FrameTriple frame_batch(const std::vector<std::vector<Detection>>& detections, int t,
                        int interval);

ScenarioSpec scenario_spec_from_json(const std::string& text);
std::string scenario_spec_to_json(const ScenarioSpec& spec);
ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
void save_scenario_spec(const ScenarioSpec& spec, const std::filesystem::path& path);

/// MOT-convention export: frames and identities become 1-based.
std::vector<MotRecord> ground_truth_records(const GroundTruth& truth);

/// Flattens per-frame detections into one frame-sorted stream with 1-based
/// frame numbers, ready for mot_io or the tracker.
std::vector<Detection> flatten_detections(const std::vector<std::vector<Detection>>& per_frame);

}  // namespace ucsl
