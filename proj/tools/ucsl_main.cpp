// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <ucsl/metrics.hpp>
#include <ucsl/mot_io.hpp>
#include <ucsl/optimizer.hpp>
#include <ucsl/scenario.hpp>
#include <ucsl/tracker.hpp>

#include <CLI11.hpp>

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void add_loss_options(CLI::App* cmd, ucsl::LossConfig& cfg, bool with_toggles = true) {
    cmd->add_option("--tau", cfg.tau, "softmax temperature")->check(CLI::PositiveNumber);
    cmd->add_option("--theta", cfg.theta, "ambiguity cosine threshold");
    cmd->add_option("--epsilon", cfg.epsilon, "log clamp");
    cmd->add_option("--weight-sc", cfg.weight_sc, "self-contrast weight");
    cmd->add_option("--weight-cc", cfg.weight_cc, "cross-contrast weight");
    cmd->add_option("--weight-ac", cfg.weight_ac, "ambiguity-contrast weight");
    if (with_toggles) {
        cmd->add_option("--use-dsc", cfg.use_dsc, "enable direct self-contrast");
        cmd->add_option("--use-isc", cfg.use_isc, "enable indirect self-contrast");
        cmd->add_option("--use-cc", cfg.use_cc, "enable cross-contrast");
        cmd->add_option("--use-ac", cfg.use_ac, "enable ambiguity contrast");
    }
}

void add_tracker_options(CLI::App* cmd, ucsl::TrackerConfig& cfg) {
    cmd->add_option("--embed-gate", cfg.embed_gate, "max embedding distance, stage 1");
    cmd->add_option("--iou-gate", cfg.iou_gate, "min IoU, stage 2");
    cmd->add_option("--buffer", cfg.buffer, "lost-track retention in frames");
    cmd->add_option("--ema-alpha", cfg.ema_alpha, "track embedding smoothing factor");
    cmd->add_option("--min-confidence", cfg.min_confidence, "detection confidence filter");
    cmd->add_option("--motion-gate", cfg.motion_gate, "enable Mahalanobis gate in stage 1");
    cmd->add_option("--motion-gate-threshold", cfg.motion_gate_threshold, "gate chi-square bound");
    cmd->add_option("--lost-in-iou", cfg.lost_in_iou_stage, "let lost tracks enter stage 2");
}

// Every materialized option value, echoed for reproducibility.
void echo_config(const CLI::App& cmd, const fs::path& out_dir) {
    std::ofstream out(out_dir / "run_config.txt", std::ios::binary);
    if (!out) {
        throw ucsl::IoError("cannot write run_config.txt in " + out_dir.string());
    }
    out << cmd.config_to_str(true, false);
}

std::vector<std::vector<ucsl::Detection>> group_by_frame(const std::vector<ucsl::Detection>& dets,
                                                         int& first_frame) {
    std::vector<std::vector<ucsl::Detection>> frames;
    if (dets.empty()) {
        first_frame = 0;
        return frames;
    }
    int lo = dets.front().frame;
    int hi = dets.front().frame;
    for (const auto& d : dets) {
        lo = std::min(lo, d.frame);
        hi = std::max(hi, d.frame);
    }
    first_frame = lo;
    frames.resize(static_cast<std::size_t>(hi - lo + 1));
    for (const auto& d : dets) {
        frames[static_cast<std::size_t>(d.frame - lo)].push_back(d);
    }
    return frames;
}

std::vector<ucsl::EmbeddingMatrix> frames_to_matrices(
    const std::vector<std::vector<ucsl::Detection>>& frames) {
    std::vector<ucsl::EmbeddingMatrix> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        const int dim = f.empty() ? 0 : static_cast<int>(f.front().embedding.size());
        Eigen::MatrixXd m(dim, static_cast<int>(f.size()));
        for (std::size_t j = 0; j < f.size(); ++j) {
            m.col(static_cast<int>(j)) = f[j].embedding;
        }
        out.emplace_back(std::move(m));
    }
    return out;
}

void matrices_to_frames(const std::vector<ucsl::EmbeddingMatrix>& matrices,
                        std::vector<std::vector<ucsl::Detection>>& frames) {
    for (std::size_t t = 0; t < frames.size(); ++t) {
        for (std::size_t j = 0; j < frames[t].size(); ++j) {
            frames[t][j].embedding = matrices[t].data.col(static_cast<int>(j));
        }
    }
}

std::vector<ucsl::MotRecord> records_from_tracks(const std::vector<ucsl::TrackRecord>& tracks) {
    std::vector<ucsl::MotRecord> records;
    records.reserve(tracks.size());
    for (const auto& t : tracks) {
        ucsl::MotRecord r;
        r.frame = t.frame;
        r.id = t.track_id;
        r.bb_left = t.box.x;
        r.bb_top = t.box.y;
        r.bb_width = t.box.w;
        r.bb_height = t.box.h;
        r.conf = 1.0;
        records.push_back(r);
    }
    return records;
}

void write_trace(const std::vector<ucsl::OptimizationTrace>& trace, std::ostream& out) {
    out << "step,l_sc,l_cc,l_ac,total,mean_self_diag\n";
    for (const auto& t : trace) {
        out << t.step << ',' << fmt(t.loss.l_sc) << ',' << fmt(t.loss.l_cc) << ','
            << fmt(t.loss.l_ac) << ',' << fmt(t.loss.total) << ',' << fmt(t.mean_self_diag)
            << '\n';
    }
}

struct AblateRow {
    std::string subset;
    std::uint64_t seed;
    ucsl::MetricsReport report;
};

struct AblateSubset {
    std::string name;
    bool optimize;
    bool dsc, isc, cc, ac;
};

const std::vector<AblateSubset> kAblateSubsets = {
    {"none", false, false, false, false, false},
    {"dsc", true, true, false, false, false},
    {"isc", true, false, true, false, false},
    {"dsc+isc", true, true, true, false, false},
    {"dsc+isc+cc", true, true, true, true, false},
    {"dsc+isc+cc+ac", true, true, true, true, true},
};

int run_simulate(const fs::path& spec_path, const fs::path& out_dir, std::uint64_t seed_override,
                 bool has_seed, const CLI::App& cmd) {
    ucsl::ScenarioSpec spec = ucsl::load_scenario_spec(spec_path);
    if (has_seed) {
        spec.seed = seed_override;
    }
    fs::create_directories(out_dir);
    const ucsl::Scenario scenario = ucsl::generate(spec);

    ucsl::save_scenario_spec(spec, out_dir / "scenario.json");
    ucsl::write_records(ucsl::ground_truth_records(scenario.truth), out_dir / "gt.txt");
    ucsl::write_detections(ucsl::flatten_detections(scenario.detections), out_dir / "det.txt",
                           out_dir / "det_emb.bin");
    echo_config(cmd, out_dir);
    std::cout << "frames=" << scenario.detections.size() << " gt=" << scenario.truth.frames.size()
              << " out=" << out_dir.string() << "\n";
    return 0;
}

int run_losses(const fs::path& det_path, const fs::path& emb_path, int interval,
               const ucsl::LossConfig& cfg) {
    const std::vector<ucsl::Detection> dets = ucsl::read_detections(det_path, emb_path);
    int first_frame = 0;
    const auto frames = group_by_frame(dets, first_frame);
    std::cout << "frame,l_sc,l_cc,l_ac,total,skipped\n";
    for (int t = 2 * interval; t < static_cast<int>(frames.size()); ++t) {
        const ucsl::FrameTriple triple = ucsl::frame_batch(frames, t, interval);
        ucsl::LossReport rep;
        if (triple[0].count() == 0 || triple[1].count() == 0 || triple[2].count() == 0) {
            rep.skipped = true;
        } else {
            rep = ucsl::total_loss(ucsl::normalize_columns(triple[0]),
                                   ucsl::normalize_columns(triple[1]),
                                   ucsl::normalize_columns(triple[2]), cfg);
        }
        std::cout << (first_frame + t) << ',' << fmt(rep.l_sc) << ',' << fmt(rep.l_cc) << ','
                  << fmt(rep.l_ac) << ',' << fmt(rep.total) << ',' << (rep.skipped ? 1 : 0)
                  << '\n';
    }
    return 0;
}

int run_optimize(const fs::path& spec_path, const fs::path& out_dir, int steps, double lr,
                 int interval, const ucsl::LossConfig& cfg, std::uint64_t seed_override,
                 bool has_seed, const CLI::App& cmd) {
    ucsl::ScenarioSpec spec = ucsl::load_scenario_spec(spec_path);
    if (has_seed) {
        spec.seed = seed_override;
    }
    fs::create_directories(out_dir);
    ucsl::Scenario scenario = ucsl::generate(spec);

    std::vector<ucsl::EmbeddingMatrix> matrices = frames_to_matrices(scenario.detections);
    const std::vector<ucsl::OptimizationTrace> trace =
        ucsl::optimize_sequence(matrices, cfg, steps, lr, interval);
    matrices_to_frames(matrices, scenario.detections);

    std::ofstream trace_out(out_dir / "trace.csv", std::ios::binary);
    if (!trace_out) {
        throw ucsl::IoError("cannot write trace.csv");
    }
    write_trace(trace, trace_out);
    ucsl::save_scenario_spec(spec, out_dir / "scenario.json");
    ucsl::write_records(ucsl::ground_truth_records(scenario.truth), out_dir / "gt.txt");
    ucsl::write_detections(ucsl::flatten_detections(scenario.detections), out_dir / "det.txt",
                           out_dir / "det_emb.bin");
    echo_config(cmd, out_dir);
    std::cout << "steps=" << steps << " initial_loss=" << fmt(trace.front().loss.total)
              << " final_loss=" << fmt(trace.back().loss.total) << "\n";
    return 0;
}

int run_track(const fs::path& det_path, const fs::path& emb_path, const fs::path& out_dir,
              const ucsl::TrackerConfig& cfg, const CLI::App& cmd) {
    const std::vector<ucsl::Detection> dets = ucsl::read_detections(det_path, emb_path);
    const std::vector<ucsl::TrackRecord> tracks = ucsl::run_tracker(dets, cfg);
    fs::create_directories(out_dir);
    ucsl::write_records(records_from_tracks(tracks), out_dir / "result.txt");
    echo_config(cmd, out_dir);
    std::cout << "records=" << tracks.size() << " out=" << (out_dir / "result.txt").string()
              << "\n";
    return 0;
}

int run_eval(const fs::path& gt_path, const fs::path& result_path, double iou_threshold) {
    const auto gt = ucsl::read_records(gt_path, ucsl::RecordKind::GroundTruth);
    const auto pred = ucsl::read_records(result_path, ucsl::RecordKind::Result);
    const ucsl::MetricsReport r = ucsl::evaluate(gt, pred, iou_threshold);
    std::printf("MOTA   %.4f\n", r.mota);
    std::printf("IDF1   %.4f\n", r.idf1);
    std::printf("FP     %lld\n", r.fp);
    std::printf("FN     %lld\n", r.fn);
    std::printf("IDS    %lld\n", r.ids);
    std::printf("MT     %d (%.3f)\n", r.mt, r.mt_ratio);
    std::printf("ML     %d (%.3f)\n", r.ml, r.ml_ratio);
    std::printf("GT     %lld boxes, %d tracks\n", r.gt_count, r.gt_tracks);
    std::cout << "SUMMARY mota=" << fmt(r.mota) << " idf1=" << fmt(r.idf1) << " fp=" << r.fp
              << " fn=" << r.fn << " ids=" << r.ids << " mt=" << r.mt << " ml=" << r.ml
              << " mt_ratio=" << fmt(r.mt_ratio) << " ml_ratio=" << fmt(r.ml_ratio)
              << " gt=" << r.gt_count << "\n";
    return 0;
}

AblateRow ablate_one(const ucsl::ScenarioSpec& base, std::uint64_t seed,
                     const AblateSubset& subset, const ucsl::LossConfig& base_cfg,
                     const ucsl::TrackerConfig& tracker_cfg, int steps, double lr, int interval) {
    ucsl::ScenarioSpec spec = base;
    spec.seed = seed;
    ucsl::Scenario scenario = ucsl::generate(spec);

    if (subset.optimize) {
        ucsl::LossConfig cfg = base_cfg;
        cfg.use_dsc = subset.dsc;
        cfg.use_isc = subset.isc;
        cfg.use_cc = subset.cc;
        cfg.use_ac = subset.ac;
        std::vector<ucsl::EmbeddingMatrix> matrices = frames_to_matrices(scenario.detections);
        ucsl::optimize_sequence(matrices, cfg, steps, lr, interval);
        matrices_to_frames(matrices, scenario.detections);
    }

    const auto tracks = ucsl::run_tracker(ucsl::flatten_detections(scenario.detections), tracker_cfg);
    const auto gt = ucsl::ground_truth_records(scenario.truth);
    return AblateRow{subset.name, seed, ucsl::evaluate(gt, records_from_tracks(tracks))};
}

int run_ablate(const fs::path& spec_path, const fs::path& out_dir, int seeds, int steps, double lr,
               int interval, const ucsl::LossConfig& base_cfg,
               const ucsl::TrackerConfig& tracker_cfg, const CLI::App& cmd) {
    const ucsl::ScenarioSpec base = ucsl::load_scenario_spec(spec_path);
    fs::create_directories(out_dir);

    // Seeds run in parallel; each pipeline is independent and deterministic.
    std::vector<std::future<std::vector<AblateRow>>> futures;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = base.seed + static_cast<std::uint64_t>(s);
        futures.push_back(std::async(std::launch::async, [&, seed]() {
            std::vector<AblateRow> rows;
            for (const AblateSubset& subset : kAblateSubsets) {
                rows.push_back(
                    ablate_one(base, seed, subset, base_cfg, tracker_cfg, steps, lr, interval));
            }
            return rows;
        }));
    }

    std::vector<AblateRow> rows;
    for (auto& f : futures) {
        for (AblateRow& row : f.get()) {
            rows.push_back(std::move(row));
        }
    }
    // Stable presentation order: subset ladder first, then seed.
    std::stable_sort(rows.begin(), rows.end(), [](const AblateRow& a, const AblateRow& b) {
        auto rank = [](const std::string& name) {
            for (std::size_t i = 0; i < kAblateSubsets.size(); ++i) {
                if (kAblateSubsets[i].name == name) {
                    return i;
                }
            }
            return kAblateSubsets.size();
        };
        if (rank(a.subset) != rank(b.subset)) {
            return rank(a.subset) < rank(b.subset);
        }
        return a.seed < b.seed;
    });

    std::ofstream csv(out_dir / "ablation.csv", std::ios::binary);
    if (!csv) {
        throw ucsl::IoError("cannot write ablation.csv");
    }
    const std::string header = "subset,seed,idf1,mota,ids,fp,fn\n";
    csv << header;
    std::cout << header;
    for (const AblateRow& r : rows) {
        std::string line = r.subset + "," + std::to_string(r.seed) + "," + fmt(r.report.idf1) +
                           "," + fmt(r.report.mota) + "," + std::to_string(r.report.ids) + "," +
                           std::to_string(r.report.fp) + "," + std::to_string(r.report.fn) + "\n";
        csv << line;
        std::cout << line;
    }
    echo_config(cmd, out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UCSL contrastive-similarity losses and online tracker"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "",
                   "key=value config file; one [section] per subcommand, flags override");
    app.fallthrough(true);
    app.require_subcommand(1);

    // --- simulate ---
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario");
    fs::path sim_spec, sim_out;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--spec", sim_spec, "scenario spec JSON")->required();
    simulate->add_option("--out", sim_out, "output directory")->required();
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "override the spec seed");

    // --- losses ---
    auto* losses = app.add_subcommand("losses", "per-triple loss reports over a detection file");
    fs::path losses_det, losses_emb;
    int losses_interval = 1;
    ucsl::LossConfig losses_cfg;
    losses->add_option("--det", losses_det, "detection file")->required();
    losses->add_option("--emb", losses_emb, "embedding sidecar")->required();
    losses->add_option("--interval", losses_interval, "frame interval g")->check(CLI::PositiveNumber);
    add_loss_options(losses, losses_cfg);

    // --- optimize ---
    auto* optimize = app.add_subcommand("optimize", "descend the losses over a scenario");
    fs::path opt_spec, opt_out;
    int opt_steps = 100;
    double opt_lr = 0.2;
    int opt_interval = 1;
    std::uint64_t opt_seed = 0;
    ucsl::LossConfig opt_cfg;
    optimize->add_option("--spec", opt_spec, "scenario spec JSON")->required();
    optimize->add_option("--out", opt_out, "output directory")->required();
    optimize->add_option("--steps", opt_steps, "descent steps")->check(CLI::PositiveNumber);
    optimize->add_option("--lr", opt_lr, "learning rate")->check(CLI::Range(1e-9, 1.0));
    optimize->add_option("--interval", opt_interval, "frame interval g")->check(CLI::PositiveNumber);
    auto* opt_seed_opt = optimize->add_option("--seed", opt_seed, "override the spec seed");
    add_loss_options(optimize, opt_cfg);

    // --- track ---
    auto* track = app.add_subcommand("track", "run the online tracker");
    fs::path track_det, track_emb, track_out;
    ucsl::TrackerConfig track_cfg;
    track->add_option("--det", track_det, "detection file")->required();
    track->add_option("--emb", track_emb, "embedding sidecar")->required();
    track->add_option("--out", track_out, "output directory")->required();
    add_tracker_options(track, track_cfg);

    // --- eval ---
    auto* eval = app.add_subcommand("eval", "CLEAR-MOT and identity metrics");
    fs::path eval_gt, eval_result;
    double eval_iou = 0.5;
    eval->add_option("--gt", eval_gt, "ground-truth file")->required();
    eval->add_option("--result", eval_result, "tracker result file")->required();
    eval->add_option("--iou-threshold", eval_iou, "match threshold");

    // --- ablate ---
    auto* ablate = app.add_subcommand("ablate", "loss-subset comparison table");
    fs::path abl_spec, abl_out;
    int abl_seeds = 5;
    int abl_steps = 50;
    double abl_lr = 0.2;
    int abl_interval = 1;
    ucsl::LossConfig abl_cfg;
    ucsl::TrackerConfig abl_tracker;
    ablate->add_option("--spec", abl_spec, "scenario spec JSON")->required();
    ablate->add_option("--out", abl_out, "output directory")->required();
    ablate->add_option("--seeds", abl_seeds, "number of seeds")->check(CLI::PositiveNumber);
    ablate->add_option("--steps", abl_steps, "descent steps per run")->check(CLI::PositiveNumber);
    ablate->add_option("--lr", abl_lr, "learning rate")->check(CLI::Range(1e-9, 1.0));
    ablate->add_option("--interval", abl_interval, "frame interval g")->check(CLI::PositiveNumber);
    add_loss_options(ablate, abl_cfg, /*with_toggles=*/false);
    add_tracker_options(ablate, abl_tracker);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Exit code contract: 1 for every usage or config-file problem.
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(sim_spec, sim_out, sim_seed, sim_seed_opt->count() > 0, *simulate);
        }
        if (losses->parsed()) {
            return run_losses(losses_det, losses_emb, losses_interval, losses_cfg);
        }
        if (optimize->parsed()) {
            return run_optimize(opt_spec, opt_out, opt_steps, opt_lr, opt_interval, opt_cfg,
                                opt_seed, opt_seed_opt->count() > 0, *optimize);
        }
        if (track->parsed()) {
            return run_track(track_det, track_emb, track_out, track_cfg, *track);
        }
        if (eval->parsed()) {
            return run_eval(eval_gt, eval_result, eval_iou);
        }
        if (ablate->parsed()) {
            return run_ablate(abl_spec, abl_out, abl_seeds, abl_steps, abl_lr, abl_interval,
                              abl_cfg, abl_tracker, *ablate);
        }
    } catch (const ucsl::InvalidSpecError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 1;
    } catch (const ucsl::IoError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 1;
    } catch (const ucsl::Error& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
