// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL] line;
// the process exits nonzero if any criterion fails.
//
// Usage: acceptance --cli <path to the homecore binary> --data <data dir>

#include <sys/wait.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "homecore/error.hpp"
#include "homecore/esn.hpp"
#include "homecore/geometry.hpp"
#include "homecore/grasp.hpp"
#include "homecore/planner.hpp"
#include "homecore/rng.hpp"
#include "homecore/scene_gen.hpp"
#include "homecore/semantic_map.hpp"
#include "support/oracles.hpp"

using namespace homecore;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

[[noreturn]] void fail(const std::string& message) { throw std::runtime_error(message); }

void expect(bool condition, const std::string& message) {
  if (!condition) fail(message);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  out << content;
}

// ---------------------------------------------------------------------------
// 1. Polygon containment against the ray-casting oracle.

void check_geometry_oracle() {
  Rng rng(0x9e3779b9);
  const auto t0 = Clock::now();
  long queries = 0;

  auto check_polygon = [&](const std::vector<geom::Point2>& vertices) {
    const geom::Polygon2 polygon(vertices);
    geom::Point2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const geom::Point2& v : vertices) {
      lo.x = std::min(lo.x, v.x);
      lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x);
      hi.y = std::max(hi.y, v.y);
    }
    for (int q = 0; q < 40; ++q) {
      const geom::Point2 p{rng.uniform(lo.x - 0.5, hi.x + 0.5),
                           rng.uniform(lo.y - 0.5, hi.y + 0.5)};
      if (oracles::boundary_distance(vertices, p) <= 1e-6) continue;
      ++queries;
      if (polygon.contains(p) != oracles::ray_cast_contains(vertices, p))
        fail("containment disagreement at (" + std::to_string(p.x) + ", " +
             std::to_string(p.y) + ")");
    }
  };

  for (int i = 0; i < 1000; ++i) check_polygon(oracles::random_convex_polygon(rng));
  for (int i = 0; i < 200; ++i) check_polygon(oracles::random_rectilinear_polygon(rng));

  const double elapsed = seconds_since(t0);
  expect(queries > 30000, "too few off-boundary queries: " + std::to_string(queries));
  expect(elapsed < 5.0, "took " + std::to_string(elapsed) + " s (budget 5 s)");
}

// ---------------------------------------------------------------------------
// 2. Navigation goals on randomized room/furniture fixtures.

void check_navigation_contract() {
  Rng rng(0x51ed270b);
  for (int i = 0; i < 100; ++i) {
    const double room_w = rng.uniform(4.0, 10.0);
    const double room_h = rng.uniform(4.0, 10.0);
    const double standoff = rng.uniform(0.2, 0.6);
    const double fw = rng.uniform(0.4, 1.5);
    const double fh = rng.uniform(0.4, 1.5);
    const double margin = standoff + 0.15;
    const double fx = rng.uniform(margin, room_w - fw - margin);
    const double fy = rng.uniform(margin, room_h - fh - margin);

    json room_contour = json::array();
    room_contour.push_back({0.0, 0.0});
    room_contour.push_back({room_w, 0.0});
    room_contour.push_back({room_w, room_h});
    room_contour.push_back({0.0, room_h});
    json furniture_contour = json::array();
    furniture_contour.push_back({fx, fy});
    furniture_contour.push_back({fx + fw, fy});
    furniture_contour.push_back({fx + fw, fy + fh});
    furniture_contour.push_back({fx, fy + fh});
    const json root = {
        {"rooms", json::array({json{{"name", "room"}, {"contour", room_contour}}})},
        {"furniture", json::array({json{{"name", "obj"},
                                        {"room", "room"},
                                        {"contour", furniture_contour}}})},
        {"doors", json::array()}};

    const semmap::SemanticMap map = semmap::load_map(root.dump());
    const semmap::NavigationGoal goal = semmap::navigation_point(map, "obj", standoff);
    const geom::Point2 at = goal.pose.position;

    expect(map.rooms[0].contour.contains(at),
           "fixture " + std::to_string(i) + ": goal left the room");
    expect(!map.furniture[0].contour.contains(at),
           "fixture " + std::to_string(i) + ": goal inside the furniture");
    expect(std::abs(geom::distance(at, goal.edge_midpoint) - standoff) <= 1e-9,
           "fixture " + std::to_string(i) + ": standoff distance off");
    const geom::Point2 d = goal.edge_midpoint - at;
    expect(std::abs(geom::wrap_angle(std::atan2(d.y, d.x) - goal.pose.yaw)) <= 1e-9,
           "fixture " + std::to_string(i) + ": yaw not facing the edge midpoint");
  }
}

// ---------------------------------------------------------------------------
// 3. PCA boxes recover known rotations.

void check_pca_bbox() {
  Rng rng(0xb0c3f00d);
  for (int i = 0; i < 100; ++i) {
    const double d0 = rng.uniform(0.6, 1.2);
    const double d1 = d0 * rng.uniform(0.55, 0.8);
    const double d2 = d1 * rng.uniform(0.55, 0.8);
    const Mat3 rotation = oracles::random_rotation(rng);
    const Vec3 center{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                      rng.uniform(1.0, 3.0)};
    const cloud::PointCloud points =
        oracles::box_cloud(center, {d0, d1, d2}, rotation, 5);
    const grasp::OrientedBBox3 bbox = grasp::pca_bbox(points);

    for (int a = 0; a < 3; ++a) {
      const Vec3 truth = rotation.col(a);
      const double dp = std::min(1.0, std::abs(dot(bbox.axes[a], truth)));
      const double angle = std::acos(dp);
      expect(angle <= 1e-6, "box " + std::to_string(i) + ": axis " + std::to_string(a) +
                                " off by " + std::to_string(angle) + " rad");
    }
    for (const Vec3& p : points.points)
      expect(bbox.contains(p, 1e-6),
             "box " + std::to_string(i) + ": sample point escapes the inflated box");
  }
}

// ---------------------------------------------------------------------------
// 4. Two-object depth scenes: nearest selection and the approach rule.

void paint_rect(grasp::DepthImage& depth, grasp::ObjectMask& mask, int x0, int y0,
                int w, int h, double meters) {
  for (int v = y0; v < y0 + h; ++v)
    for (int u = x0; u < x0 + w; ++u) {
      depth.depth[static_cast<std::size_t>(v) * depth.width + u] = meters;
      mask.bits[static_cast<std::size_t>(v) * mask.width + u] = 255;
    }
}

void check_grasp_scenes() {
  cam::CameraIntrinsics k;
  k.fx = 300.0;
  k.fy = 300.0;
  k.cx = 160.0;
  k.cy = 120.0;
  k.width = 320;
  k.height = 240;

  Rng rng(0x6a5eed);
  int top_cases = 0;
  for (int i = 0; i < 50; ++i) {
    // Scene 0 reproduces the wide-object case: grasped from the top because
    // the footprint is longer than the height.
    const bool wide = i == 0 ? true : rng.uniform(0.0, 1.0) < 0.5;
    int nw = static_cast<int>(rng.uniform_int(40, 80));
    int nh = static_cast<int>(rng.uniform_int(24, 60));
    if (wide && nw <= nh + 8) nw = nh + 9;
    if (!wide && nh <= nw + 8) nh = nw + 9;
    const int fw = static_cast<int>(rng.uniform_int(30, 70));
    const int fh = static_cast<int>(rng.uniform_int(30, 70));
    const double near_depth = rng.uniform(0.5, 0.9);
    const double far_depth = rng.uniform(1.8, 2.6);

    grasp::DepthImage depth;
    depth.width = 320;
    depth.height = 240;
    depth.depth.assign(320 * 240, 0.0);
    grasp::ObjectMask near_mask;
    near_mask.width = 320;
    near_mask.height = 240;
    near_mask.bits.assign(320 * 240, 0);
    grasp::ObjectMask far_mask = near_mask;

    paint_rect(depth, near_mask, 200, 120 - nh / 2, nw, nh, near_depth);
    paint_rect(depth, far_mask, 40, 120 - fh / 2, fw, fh, far_depth);

    const bool near_first = rng.uniform(0.0, 1.0) < 0.5;
    const std::vector<grasp::ObjectMask> masks =
        near_first ? std::vector<grasp::ObjectMask>{near_mask, far_mask}
                   : std::vector<grasp::ObjectMask>{far_mask, near_mask};
    const std::size_t expected_index = near_first ? 0 : 1;

    const grasp::GraspEstimate estimate = grasp::estimate_grasp(depth, masks, k);
    expect(estimate.mask_index == expected_index,
           "scene " + std::to_string(i) + ": picked the farther object");
    const grasp::Approach want = nw > nh ? grasp::Approach::Top : grasp::Approach::Front;
    expect(estimate.pose.approach == want,
           "scene " + std::to_string(i) + ": approach disagrees with the rule table");
    if (want == grasp::Approach::Top) ++top_cases;
  }
  expect(top_cases >= 1, "no wide/top scene exercised");
}

// ---------------------------------------------------------------------------
// 5. ESN: radius calibration, ridge oracle, benchmark accuracy and speed.

void check_esn() {
  const struct {
    int n;
    std::uint64_t seed;
    double rho;
  } combos[] = {{50, 1, 0.9}, {100, 0, 0.9}, {100, 7, 0.5},
                {150, 3, 0.8}, {80, 5, 0.95}, {60, 11, 0.3}};
  for (const auto& c : combos) {
    esn::EsnConfig config;
    config.n_reservoir = c.n;
    config.seed = c.seed;
    config.spectral_radius = c.rho;
    const esn::Esn net = esn::init_esn(config, esn::kFeatureDim);
    const double measured = oracles::spectral_radius_oracle(net.w_res);
    expect(std::abs(measured - c.rho) <= 1e-6,
           "reservoir n=" + std::to_string(c.n) + " seed=" + std::to_string(c.seed) +
               ": spectral radius " + std::to_string(measured));
  }

  {
    esn::EsnConfig config;
    config.n_reservoir = 20;
    config.seed = 3;
    const std::vector<esn::LabeledSequence> data = esn::gen_dataset(8, 3);
    esn::Esn net = esn::init_esn(config, esn::kFeatureDim);
    esn::fit_readout(net, data);

    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    for (const esn::LabeledSequence& seq : data) {
      std::vector<double> x(static_cast<std::size_t>(config.n_reservoir), 0.0);
      const int washout =
          std::min(esn::kWashout, static_cast<int>(seq.frames.size()) - 1);
      for (int t = 0; t < static_cast<int>(seq.frames.size()); ++t) {
        esn::step_state(net, x, seq.frames[static_cast<std::size_t>(t)]);
        if (t >= washout) {
          rows.push_back(x);
          targets.push_back(seq.label == esn::Label::Waving ? 1.0 : -1.0);
        }
      }
    }
    const std::vector<double> w = oracles::ridge_oracle(rows, targets, config.ridge);
    expect(w.size() == net.w_out.size(), "readout size mismatch");
    double max_diff = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      max_diff = std::max(max_diff, std::abs(w[i] - net.w_out[i]));
    expect(max_diff <= 1e-8,
           "ridge readout differs from the oracle by " + std::to_string(max_diff));
  }

  {
    const std::vector<esn::LabeledSequence> train = esn::gen_dataset(200, 0);
    const std::vector<esn::LabeledSequence> test = esn::gen_dataset(100, 0, 200);
    esn::EsnConfig config;  // defaults: n=100, seed 0
    esn::Esn net = esn::init_esn(config, esn::kFeatureDim);

    const auto t0 = Clock::now();
    esn::fit_readout(net, train);
    const double train_s = seconds_since(t0);
    expect(train_s < 5.0, "training took " + std::to_string(train_s) + " s (budget 5 s)");

    const auto t1 = Clock::now();
    int correct = 0;
    for (const esn::LabeledSequence& seq : test)
      if (esn::classify(net, seq.frames).label == seq.label) ++correct;
    const double mean_ms = seconds_since(t1) * 1000.0 / static_cast<double>(test.size());
    expect(correct >= 95, "accuracy " + std::to_string(correct) + "/100 (need >= 95)");
    expect(mean_ms < 10.0,
           "inference " + std::to_string(mean_ms) + " ms/sequence (budget 10 ms)");
  }
}

// ---------------------------------------------------------------------------
// 6. Scene dataset: throughput, label validity, parallel determinism.

void check_scene_dataset(const std::string& data_dir) {
  const scene::SceneConfig config =
      scene::load_scene_config_file(data_dir + "/scene_config.json");

  const auto t0 = Clock::now();
  long labels = 0;
  for (int i = 0; i < 10000; ++i) {
    const scene::SceneSample sample = scene::sample_scene(config, i);
    const std::vector<scene::Annotation> annotations = scene::annotate(config, sample);
    const std::string text = scene::format_labels(annotations);
    expect(text.empty() == annotations.empty(), "label text disagrees with annotations");
    for (const scene::Annotation& a : annotations) {
      expect(a.cx >= 0.0 && a.cx <= 1.0 && a.cy >= 0.0 && a.cy <= 1.0 && a.w >= 0.0 &&
                 a.w <= 1.0 && a.h >= 0.0 && a.h <= 1.0,
             "sample " + std::to_string(i) + ": coordinate outside [0,1]");
      ++labels;
    }
  }
  const double elapsed = seconds_since(t0);
  expect(elapsed < 60.0,
         "10k samples took " + std::to_string(elapsed) + " s (budget 60 s)");
  expect(labels > 10000, "suspiciously few labels: " + std::to_string(labels));

  oracles::TempDir serial("acc_scene_serial");
  oracles::TempDir parallel("acc_scene_parallel");
  scene::generate_dataset(config, 250, serial.path().string(), false, 1);
  scene::generate_dataset(config, 250, parallel.path().string(), false, 4);
  expect(read_file(serial.file("manifest.json")) ==
             read_file(parallel.file("manifest.json")),
         "manifests differ between serial and parallel runs");
  for (int i = 0; i < 250; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "labels/%06d.txt", i);
    expect(read_file(serial.file(name)) == read_file(parallel.file(name)),
           std::string("label file differs: ") + name);
  }
}

// ---------------------------------------------------------------------------
// 7. Planner corpus, canonical sequence, adversarial LLM endpoint.

class ScriptedLlm {
 public:
  explicit ScriptedLlm(std::function<std::string(int)> reply, double delay_s = 0.0)
      : reply_(std::move(reply)) {
    server_.Post("/v1/chat", [this, delay_s](const httplib::Request&,
                                             httplib::Response& res) {
      const int hit = hits_.fetch_add(1);
      if (delay_s > 0.0)
        std::this_thread::sleep_for(std::chrono::duration<double>(delay_s));
      res.set_content(reply_(hit), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~ScriptedLlm() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat";
  }
  int hits() const { return hits_.load(); }

 private:
  httplib::Server server_;
  std::thread thread_;
  std::function<std::string(int)> reply_;
  std::atomic<int> hits_{0};
  int port_ = 0;
};

ErrorCode run_llm_expecting_error(const std::string& endpoint, double timeout_s,
                                  const plan::WorldState& initial) {
  plan::LlmConfig config;
  config.endpoint = endpoint;
  config.timeout_s = timeout_s;
  try {
    (void)plan::plan_and_execute("go to the kitchen", initial,
                                 plan::make_llm_backend(config));
  } catch (const Error& e) {
    return e.code();
  }
  fail("adversarial endpoint did not raise");
}

void check_planner(const std::string& data_dir) {
  const std::string world_path = data_dir + "/world_home.json";
  const plan::WorldState initial = plan::load_world_file(world_path);

  const std::vector<std::string> corpus = {
      "go to the kitchen",
      "navigate to the living_room",
      "go to the hallway",
      "go to the counter",
      "navigate to the sofa",
      "go to the door_kitchen_living",
      "bring me the right-most object on the counter",
      "bring me the left-most object on the counter",
      "fetch the closest object from the counter",
      "bring me the apple from the counter",
      "fetch the book from the table",
      "bring me the right-most object on the table",
      "take the cup from the counter to the table",
      "take the book from the table to the shelf",
      "find the bottle on the counter",
      "look for the remote on the table",
      "greet alice",
      "follow bob",
      "open the door_kitchen_hall",
      "wait 2 seconds",
  };
  expect(corpus.size() == 20, "corpus must hold 20 commands");

  for (std::size_t c = 0; c < corpus.size(); ++c) {
    const plan::Transcript t = plan::plan_and_execute(
        corpus[c], plan::load_world_file(world_path), plan::make_rule_backend(corpus[c]));
    expect(t.status == plan::Status::Done,
           "command " + std::to_string(c) + " ('" + corpus[c] + "') ended " +
               plan::status_name(t.status) + ": " + t.failure_reason);

    // Replay every step against a fresh world; each call must still validate.
    plan::WorldState world = plan::load_world_file(world_path);
    for (const plan::StepRecord& step : t.steps) {
      expect(plan::validate_call(step.call, world).empty(),
             "command " + std::to_string(c) + ": step fails validate_call on replay");
      plan::apply_delta(world, step.delta);
    }
    expect(plan::world_to_json(world) == t.final_world,
           "command " + std::to_string(c) + ": replay diverged from the final world");
  }

  const std::vector<plan::SkillCall> canonical =
      plan::parse_command("bring me the right-most object on the counter");
  const plan::Skill want[] = {plan::Skill::move, plan::Skill::find_obj,
                              plan::Skill::grasp, plan::Skill::move,
                              plan::Skill::hand_over};
  expect(canonical.size() == 5, "canonical command did not produce 5 calls");
  for (int i = 0; i < 5; ++i)
    expect(canonical[static_cast<std::size_t>(i)].skill == want[i],
           "canonical sequence differs at step " + std::to_string(i));

  {
    ScriptedLlm prose([](int) { return std::string("On my way to the kitchen!"); });
    expect(run_llm_expecting_error(prose.endpoint(), 5.0, initial) ==
               ErrorCode::schema_violation,
           "malformed replies must end in schema_violation");
  }
  {
    ScriptedLlm rogue([](int) { return std::string(R"({"skill": "teleport", "args": {}})"); });
    expect(run_llm_expecting_error(rogue.endpoint(), 5.0, initial) ==
               ErrorCode::schema_violation,
           "out-of-set skills must end in schema_violation");
    expect(rogue.hits() == 3, "out-of-set skill was not retried twice");
  }
  {
    ScriptedLlm slow([](int) { return std::string(R"({"done": true})"); }, 0.5);
    expect(run_llm_expecting_error(slow.endpoint(), 0.05, initial) == ErrorCode::timeout,
           "a stalled endpoint must end in timeout");
  }
  {
    // A well-formed action with an impossible argument is rejected before
    // execution: the step carries no delta and the world stays put.
    ScriptedLlm liar([](int) {
      return std::string(R"({"skill": "move", "args": {"location": "mars"}})");
    });
    plan::LlmConfig config;
    config.endpoint = liar.endpoint();
    const plan::Transcript t = plan::plan_and_execute(
        "go to mars", plan::load_world_file(world_path), plan::make_llm_backend(config));
    expect(t.status == plan::Status::Failed, "invalid location must fail the plan");
    expect(t.steps.size() == 1 && t.steps[0].delta.is_null(),
           "rejected call must not execute");
    expect(t.failure_reason.rfind("UnknownLocation", 0) == 0,
           "failure must surface the UnknownLocation violation");
    expect(t.final_world == plan::world_to_json(plan::load_world_file(world_path)),
           "world changed despite the rejected call");
  }
}

// ---------------------------------------------------------------------------
// 8. CLI determinism across repeated runs.

struct ProcResult {
  int status = -1;
  std::string out;
};

ProcResult run_process(const std::string& command) {
  const std::string full = command + " 2>/dev/null";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (pipe == nullptr) fail("popen failed for: " + command);
  ProcResult result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0)
    result.out.append(buffer, n);
  const int rc = ::pclose(pipe);
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

void check_cli_determinism(const std::string& cli, const std::string& data_dir) {
  oracles::TempDir inputs("acc_cli_inputs");
  oracles::TempDir outputs("acc_cli_outputs");
  const std::string in_dir = inputs.path().string();
  const std::string out_dir = outputs.path().string();

  {
    grasp::DepthImage depth;
    depth.width = 320;
    depth.height = 240;
    depth.depth.assign(320 * 240, 0.0);
    grasp::ObjectMask wide;
    wide.width = 320;
    wide.height = 240;
    wide.bits.assign(320 * 240, 0);
    grasp::ObjectMask tall = wide;
    paint_rect(depth, wide, 190, 100, 60, 30, 0.7);
    paint_rect(depth, tall, 60, 90, 30, 60, 1.9);
    grasp::save_depth_pgm(depth, in_dir + "/depth.pgm");
    grasp::save_mask_pgm(wide, in_dir + "/mask0.pgm");
    grasp::save_mask_pgm(tall, in_dir + "/mask1.pgm");
    write_file(in_dir + "/commands.txt",
               "take the cup from the counter to the table\n"
               "bring me the right-most object on the counter\n"
               "go to the hallway\n");
  }

  const std::string map = data_dir + "/map_home.json";
  const std::vector<std::pair<std::string, std::string>> invocations = {
      {"map locate", cli + " map locate --map " + map + " --x 2.0 --y 3.5"},
      {"map navgoal", cli + " map navgoal --map " + map + " --target counter"},
      {"map rasterize",
       cli + " map rasterize --map " + map + " --out " + out_dir + "/grid.pgm"},
      {"map render", cli + " map render --map " + map + " --out " + out_dir +
                         "/map.ppm --width 240"},
      {"esn gen", cli + " esn gen --count 24 --out " + out_dir + "/train.jsonl"},
      {"esn train", cli + " esn train --data " + out_dir + "/train.jsonl --out " +
                        out_dir + "/model.json"},
      {"esn eval", cli + " esn eval --model " + out_dir + "/model.json --data " +
                       out_dir + "/train.jsonl"},
      {"esn classify", cli + " esn classify --model " + out_dir + "/model.json --data " +
                           out_dir + "/train.jsonl"},
      {"scenegen", cli + " scenegen --config " + data_dir +
                       "/scene_config.json --count 12 --out " + out_dir + "/scenes"},
      {"grasp", cli + " grasp --depth " + in_dir + "/depth.pgm --mask " + in_dir +
                    "/mask0.pgm --mask " + in_dir + "/mask1.pgm --intrinsics " +
                    data_dir + "/intrinsics.json --dump-bbox"},
      {"plan", cli + " plan --world " + data_dir +
                   "/world_home.json --command \"take the cup from the counter to the"
                   " table\""},
      {"plan repl", cli + " plan --world " + data_dir + "/world_home.json --repl < " +
                        in_dir + "/commands.txt"},
  };

  const std::vector<std::string> artifacts = {
      out_dir + "/grid.pgm",    out_dir + "/map.ppm",
      out_dir + "/train.jsonl", out_dir + "/model.json",
      out_dir + "/scenes/manifest.json", out_dir + "/scenes/labels/000000.txt",
      out_dir + "/scenes/labels/000011.txt",
  };

  auto run_pass = [&](std::vector<std::string>& captured_out,
                      std::vector<std::string>& captured_files) {
    std::filesystem::remove_all(out_dir);
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, command] : invocations) {
      const ProcResult r = run_process(command);
      expect(r.status == 0,
             name + " exited with " + std::to_string(r.status) + ": " + command);
      captured_out.push_back(r.out);
    }
    for (const std::string& path : artifacts) captured_files.push_back(read_file(path));
  };

  std::vector<std::string> out_a, out_b, files_a, files_b;
  run_pass(out_a, files_a);
  run_pass(out_b, files_b);

  for (std::size_t i = 0; i < invocations.size(); ++i)
    expect(out_a[i] == out_b[i],
           invocations[i].first + ": stdout differs between identical runs");
  for (std::size_t i = 0; i < artifacts.size(); ++i)
    expect(files_a[i] == files_b[i],
           artifacts[i] + ": file bytes differ between identical runs");

  // Sanity on the JSON shape of a few outputs.
  expect(json::parse(out_a[0]).at("room") == "kitchen", "locate answer changed");
  expect(json::parse(out_a[1]).contains("position"), "navgoal output lost its pose");
  std::istringstream repl(out_a.back());
  std::string line;
  int done_lines = 0;
  while (std::getline(repl, line))
    if (json::parse(line).at("status") == "done") ++done_lines;
  expect(done_lines == 3, "repl session did not finish all three commands");
}

bool run_criterion(int number, const std::string& name,
                   const std::function<void()>& body) {
  bool ok = false;
  std::string reason;
  try {
    body();
    ok = true;
  } catch (const std::exception& e) {
    reason = e.what();
  }
  if (ok)
    std::printf("[PASS] %d. %s\n", number, name.c_str());
  else
    std::printf("[FAIL] %d. %s: %s\n", number, name.c_str(), reason.c_str());
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::string data;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli")
      cli = argv[i + 1];
    else if (flag == "--data")
      data = argv[i + 1];
  }
  if (cli.empty() || data.empty()) {
    std::fprintf(stderr, "usage: acceptance --cli <binary> --data <dir>\n");
    return 2;
  }

  int failures = 0;
  failures += !run_criterion(1, "polygon containment agrees with the ray-casting oracle",
                             [] { check_geometry_oracle(); });
  failures += !run_criterion(2, "navigation goals respect room, furniture and standoff",
                             [] { check_navigation_contract(); });
  failures += !run_criterion(3, "PCA boxes recover known rotations and contain the cloud",
                             [] { check_pca_bbox(); });
  failures += !run_criterion(4, "grasp picks the nearest object with the rule approach",
                             [] { check_grasp_scenes(); });
  failures += !run_criterion(5, "ESN radius, ridge oracle, accuracy and speed budgets",
                             [] { check_esn(); });
  failures += !run_criterion(6, "scene dataset throughput, valid labels, parallel bytes",
                             [&] { check_scene_dataset(data); });
  failures += !run_criterion(7, "planner corpus replay and adversarial LLM containment",
                             [&] { check_planner(data); });
  failures += !run_criterion(8, "CLI outputs are byte-identical across repeated runs",
                             [&] { check_cli_determinism(cli, data); });

  return failures == 0 ? 0 : 1;
}
