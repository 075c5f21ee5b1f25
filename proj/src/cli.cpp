#include "homecore/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "homecore/error.hpp"
#include "homecore/esn.hpp"
#include "homecore/grasp.hpp"
#include "homecore/planner.hpp"
#include "homecore/scene_gen.hpp"
#include "homecore/semantic_map.hpp"

namespace homecore::cli {

using nlohmann::json;

namespace {

struct Global {
  std::string format = "json";
  std::uint64_t seed = 0;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::istream* in = nullptr;

  bool json_mode() const { return format == "json"; }
  void emit(const json& j, const std::string& text) const {
    if (json_mode())
      *out << j.dump() << "\n";
    else
      *out << text << "\n";
  }
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(),
                                                suffix) == 0;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path);
  out << content;
  if (!out) raise(ErrorCode::io_error, "failed writing " + path);
}

void add_map_commands(CLI::App& map_cmd, Global& g) {
  auto* locate = map_cmd.add_subcommand("locate", "Name the room containing a point");
  {
    auto map_path = std::make_shared<std::string>();
    auto x = std::make_shared<double>(0.0);
    auto y = std::make_shared<double>(0.0);
    locate->add_option("--map", *map_path, "Map JSON file")->required();
    locate->add_option("--x", *x, "World x in meters")->required();
    locate->add_option("--y", *y, "World y in meters")->required();
    locate->callback([&g, map_path, x, y] {
      const semmap::SemanticMap map = semmap::load_map_file(*map_path);
      const semmap::LocateResult hit = semmap::locate(map, {*x, *y});
      json j;
      j["room"] = hit.room ? json(*hit.room) : json(nullptr);
      if (hit.diagnostic) j["diagnostic"] = *hit.diagnostic;
      g.emit(j, hit.room.value_or("none"));
    });
  }

  auto* navgoal = map_cmd.add_subcommand("navgoal", "Standoff pose near furniture");
  {
    auto map_path = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>();
    auto standoff = std::make_shared<double>(0.6);
    navgoal->add_option("--map", *map_path, "Map JSON file")->required();
    navgoal->add_option("--target", *target, "Furniture name")->required();
    navgoal->add_option("--standoff", *standoff, "Distance from the edge in meters");
    navgoal->callback([&g, map_path, target, standoff] {
      const semmap::SemanticMap map = semmap::load_map_file(*map_path);
      const semmap::NavigationGoal goal = semmap::navigation_point(map, *target, *standoff);
      json j;
      j["position"] = {goal.pose.position.x, goal.pose.position.y};
      j["yaw"] = goal.pose.yaw;
      j["edge_index"] = goal.edge_index;
      j["edge_midpoint"] = {goal.edge_midpoint.x, goal.edge_midpoint.y};
      std::ostringstream text;
      text << goal.pose.position.x << ' ' << goal.pose.position.y << ' ' << goal.pose.yaw;
      g.emit(j, text.str());
    });
  }

  auto* rasterize = map_cmd.add_subcommand("rasterize", "Occupancy grid with furniture");
  {
    auto map_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto resolution = std::make_shared<double>(0.05);
    auto margin = std::make_shared<double>(0.2);
    rasterize->add_option("--map", *map_path, "Map JSON file")->required();
    rasterize->add_option("--out", *out_path, "Output PGM file")->required();
    rasterize->add_option("--resolution", *resolution, "Meters per cell");
    rasterize->add_option("--margin", *margin, "Border around the map in meters");
    rasterize->callback([&g, map_path, out_path, resolution, margin] {
      const semmap::SemanticMap map = semmap::load_map_file(*map_path);
      const semmap::OccupancyGrid grid =
          semmap::inject_obstacles(map, semmap::make_grid(map, *resolution, *margin));
      img::Gray8 image;
      image.width = grid.width;
      image.height = grid.height;
      image.pixels.resize(static_cast<std::size_t>(grid.width) * grid.height);
      for (int iy = 0; iy < grid.height; ++iy)
        for (int ix = 0; ix < grid.width; ++ix)
          image.pixels[static_cast<std::size_t>(grid.height - 1 - iy) * grid.width + ix] =
              grid.at(ix, iy) ? 0 : 255;
      img::write_pgm8(*out_path, image);
      json j;
      j["out"] = *out_path;
      j["width"] = grid.width;
      j["height"] = grid.height;
      j["resolution"] = grid.resolution;
      j["origin"] = {grid.origin.x, grid.origin.y};
      j["occupied"] = grid.occupied_count();
      std::ostringstream text;
      text << *out_path << ": " << grid.width << "x" << grid.height << ", "
           << grid.occupied_count() << " occupied";
      g.emit(j, text.str());
    });
  }

  auto* render = map_cmd.add_subcommand("render", "Draw the map as PPM or SVG");
  {
    auto map_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto width = std::make_shared<int>(800);
    render->add_option("--map", *map_path, "Map JSON file")->required();
    render->add_option("--out", *out_path, "Output .ppm or .svg file")->required();
    render->add_option("--width", *width, "Image width in pixels");
    render->callback([&g, map_path, out_path, width] {
      const semmap::SemanticMap map = semmap::load_map_file(*map_path);
      const semmap::ColorTable colors = semmap::assign_colors(map, g.seed);
      json j;
      j["out"] = *out_path;
      if (ends_with(*out_path, ".svg")) {
        write_text_file(*out_path, semmap::render_svg(map, colors, *width));
        j["format"] = "svg";
      } else if (ends_with(*out_path, ".ppm")) {
        const img::RgbImage image = semmap::render(map, colors, *width);
        img::write_ppm(*out_path, image);
        j["format"] = "ppm";
        j["width"] = image.width;
        j["height"] = image.height;
      } else {
        raise(ErrorCode::invalid_config,
              "render output must end in .ppm or .svg: " + *out_path);
      }
      g.emit(j, *out_path);
    });
  }
}

json bbox_json(const grasp::OrientedBBox3& bbox) {
  json j;
  j["center"] = {bbox.center.x, bbox.center.y, bbox.center.z};
  j["axes"] = json::array();
  for (const Vec3& a : bbox.axes) j["axes"].push_back({a.x, a.y, a.z});
  j["extents"] = bbox.extents;
  return j;
}

void add_grasp_command(CLI::App& grasp_cmd, Global& g) {
  auto depth_path = std::make_shared<std::string>();
  auto mask_paths = std::make_shared<std::vector<std::string>>();
  auto intrinsics_path = std::make_shared<std::string>();
  auto dump_bbox = std::make_shared<bool>(false);
  auto cloud_out = std::make_shared<std::string>();
  grasp_cmd.add_option("--depth", *depth_path, "16-bit PGM depth image, millimeters")
      ->required();
  grasp_cmd.add_option("--mask", *mask_paths, "8-bit PGM object mask (repeatable)")
      ->required();
  grasp_cmd.add_option("--intrinsics", *intrinsics_path, "Camera intrinsics JSON")
      ->required();
  grasp_cmd.add_flag("--dump-bbox", *dump_bbox, "Include the oriented box in the output");
  grasp_cmd.add_option("--cloud-out", *cloud_out,
                       "Write the selected object's point cloud as ASCII PLY");
  grasp_cmd.callback([&g, depth_path, mask_paths, intrinsics_path, dump_bbox, cloud_out] {
    const grasp::DepthImage depth = grasp::load_depth_pgm(*depth_path);
    std::vector<grasp::ObjectMask> masks;
    for (const std::string& path : *mask_paths)
      masks.push_back(grasp::load_mask_pgm(path));
    const cam::CameraIntrinsics k = cam::load_intrinsics_file(*intrinsics_path);
    const grasp::GraspEstimate estimate = grasp::estimate_grasp(depth, masks, k);
    if (!cloud_out->empty())
      cloud::write_ply(grasp::deproject(depth, masks[estimate.mask_index], k), *cloud_out);

    json j;
    j["approach"] = grasp::approach_name(estimate.pose.approach);
    j["position"] = {estimate.pose.position.x, estimate.pose.position.y,
                     estimate.pose.position.z};
    j["yaw"] = estimate.pose.yaw;
    if (*dump_bbox) j["bbox"] = bbox_json(estimate.bbox);
    std::ostringstream text;
    text << grasp::approach_name(estimate.pose.approach) << " at ("
         << estimate.pose.position.x << ", " << estimate.pose.position.y << ", "
         << estimate.pose.position.z << "), yaw " << estimate.pose.yaw;
    g.emit(j, text.str());
  });
}

void add_esn_commands(CLI::App& esn_cmd, Global& g) {
  auto* gen = esn_cmd.add_subcommand("gen", "Write a synthetic gesture dataset");
  {
    auto count = std::make_shared<int>(0);
    auto start = std::make_shared<int>(0);
    auto out_path = std::make_shared<std::string>();
    gen->add_option("--count", *count, "Number of sequences")
        ->required()
        ->check(CLI::PositiveNumber);
    gen->add_option("--start", *start, "First sequence index");
    gen->add_option("--out", *out_path, "Output JSONL file")->required();
    gen->callback([&g, count, start, out_path] {
      const std::vector<esn::LabeledSequence> data =
          esn::gen_dataset(*count, g.seed, *start);
      esn::save_dataset_file(data, *out_path);
      json j{{"count", *count}, {"out", *out_path}};
      g.emit(j, std::to_string(*count) + " sequences -> " + *out_path);
    });
  }

  auto* train = esn_cmd.add_subcommand("train", "Fit the readout on a labeled dataset");
  {
    auto config_path = std::make_shared<std::string>();
    auto data_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    train->add_option("--config", *config_path, "Network config JSON (defaults if absent)");
    train->add_option("--data", *data_path, "Training JSONL file")->required();
    train->add_option("--out", *out_path, "Output model JSON file")->required();
    train->callback([&g, config_path, data_path, out_path] {
      esn::EsnConfig config;
      if (!config_path->empty()) config = esn::load_config_file(*config_path);
      const std::vector<esn::LabeledSequence> data = esn::load_dataset_file(*data_path);
      if (data.empty()) raise(ErrorCode::empty_input, "training dataset is empty");
      esn::Esn net = esn::init_esn(config, static_cast<int>(data[0].frames[0].size()));
      esn::fit_readout(net, data);
      esn::save_model_file(net, *out_path);
      json j{{"out", *out_path},
             {"sequences", data.size()},
             {"n_reservoir", config.n_reservoir},
             {"input_dim", net.input_dim}};
      g.emit(j, "trained on " + std::to_string(data.size()) + " sequences -> " + *out_path);
    });
  }

  auto* eval = esn_cmd.add_subcommand("eval", "Accuracy and confusion on a labeled set");
  {
    auto model_path = std::make_shared<std::string>();
    auto data_path = std::make_shared<std::string>();
    eval->add_option("--model", *model_path, "Model JSON file")->required();
    eval->add_option("--data", *data_path, "Evaluation JSONL file")->required();
    eval->callback([&g, model_path, data_path] {
      const esn::Esn net = esn::load_model_file(*model_path);
      const std::vector<esn::LabeledSequence> data = esn::load_dataset_file(*data_path);
      if (data.empty()) raise(ErrorCode::empty_input, "evaluation dataset is empty");

      int tp = 0, tn = 0, fp = 0, fn = 0;
      const auto t0 = std::chrono::steady_clock::now();
      for (const esn::LabeledSequence& s : data) {
        const esn::Label got = esn::classify(net, s.frames).label;
        if (s.label == esn::Label::Waving)
          (got == esn::Label::Waving ? tp : fn) += 1;
        else
          (got == esn::Label::NotWaving ? tn : fp) += 1;
      }
      const auto t1 = std::chrono::steady_clock::now();
      const double total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      const double accuracy = static_cast<double>(tp + tn) / static_cast<double>(data.size());
      const double latency_ms = total_ms / static_cast<double>(data.size());

      json j{{"accuracy", accuracy},
             {"count", data.size()},
             {"confusion", {{"tp", tp}, {"fp", fp}, {"fn", fn}, {"tn", tn}}}};
      std::ostringstream text;
      text << "accuracy " << accuracy << " on " << data.size() << " sequences (tp " << tp
           << ", fp " << fp << ", fn " << fn << ", tn " << tn << ")";
      g.emit(j, text.str());
      // Wall-clock figure goes to stderr so stdout stays byte-reproducible.
      if (g.json_mode())
        *g.err << json{{"mean_latency_ms", latency_ms}}.dump() << "\n";
      else
        *g.err << "mean latency " << latency_ms << " ms/sequence\n";
    });
  }

  auto* classify = esn_cmd.add_subcommand("classify", "Label sequences from a JSONL file");
  {
    auto model_path = std::make_shared<std::string>();
    auto data_path = std::make_shared<std::string>();
    classify->add_option("--model", *model_path, "Model JSON file")->required();
    classify->add_option("--data", *data_path, "JSONL file; labels optional")->required();
    classify->callback([&g, model_path, data_path] {
      const esn::Esn net = esn::load_model_file(*model_path);
      std::ifstream in(*data_path);
      if (!in) raise(ErrorCode::io_error, "cannot open data file " + *data_path);

      json predictions = json::array();
      std::ostringstream text;
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (!row.is_object() || !row.contains("frames"))
          raise(ErrorCode::parse_error,
                "line " + std::to_string(line_no) + ": expected {\"frames\": [...]}");
        std::vector<std::vector<double>> frames;
        try {
          frames = row["frames"].get<std::vector<std::vector<double>>>();
        } catch (const json::exception& e) {
          raise(ErrorCode::parse_error,
                "line " + std::to_string(line_no) + ": " + e.what());
        }
        const esn::Classification c = esn::classify(net, frames);
        predictions.push_back({{"label", esn::label_name(c.label)}, {"score", c.score}});
        text << esn::label_name(c.label) << "\n";
      }
      g.emit(json{{"predictions", predictions}},
             text.str().empty() ? "" : text.str().substr(0, text.str().size() - 1));
    });
  }
}

void add_scenegen_command(CLI::App& scenegen_cmd, Global& g) {
  auto config_path = std::make_shared<std::string>();
  auto count = std::make_shared<int>(0);
  auto out_dir = std::make_shared<std::string>();
  auto previews = std::make_shared<bool>(false);
  auto jobs = std::make_shared<int>(1);
  scenegen_cmd.add_option("--config", *config_path, "Scene config JSON")->required();
  scenegen_cmd.add_option("--count", *count, "Number of samples")
      ->required()
      ->check(CLI::PositiveNumber);
  scenegen_cmd.add_option("--out", *out_dir, "Output directory")->required();
  scenegen_cmd.add_flag("--previews", *previews, "Also write PPM previews");
  scenegen_cmd.add_option("--jobs", *jobs, "Worker threads")->check(CLI::PositiveNumber);
  scenegen_cmd.callback([&g, config_path, count, out_dir, previews, jobs] {
    const scene::SceneConfig config = scene::load_scene_config_file(*config_path);
    const scene::DatasetManifest manifest =
        scene::generate_dataset(config, *count, *out_dir, *previews, *jobs);
    json j{{"count", manifest.count},
           {"out", *out_dir},
           {"manifest", *out_dir + "/manifest.json"},
           {"labels", *out_dir + "/labels"}};
    g.emit(j, std::to_string(manifest.count) + " samples -> " + *out_dir);
  });
}

void transcript_text(const plan::Transcript& t, std::ostream& out) {
  for (const plan::StepRecord& step : t.steps)
    out << plan::skill_name(step.call.skill) << ' ' << step.call.args.dump() << " -> "
        << step.outcome << "\n";
  out << "status: " << plan::status_name(t.status);
  if (t.status != plan::Status::Done) out << " (" << t.failure_reason << ")";
  out << "\n";
}

void add_plan_command(CLI::App& plan_cmd, Global& g) {
  auto world_path = std::make_shared<std::string>();
  auto backend_name = std::make_shared<std::string>("rule");
  auto command = std::make_shared<std::string>();
  auto repl = std::make_shared<bool>(false);
  auto transcript_path = std::make_shared<std::string>();
  auto endpoint = std::make_shared<std::string>();
  plan_cmd.add_option("--world", *world_path, "World JSON file")->required();
  plan_cmd.add_option("--backend", *backend_name, "Planning backend")
      ->check(CLI::IsMember({"rule", "llm"}));
  plan_cmd.add_option("--command", *command, "Command to execute");
  plan_cmd.add_flag("--repl", *repl, "Read commands line by line from standard input");
  plan_cmd.add_option("--transcript", *transcript_path, "Also write the transcript here");
  plan_cmd.add_option("--endpoint", *endpoint, "LLM HTTP endpoint")
      ->envname("LLM_ENDPOINT");
  plan_cmd.callback([&g, world_path, backend_name, command, repl, transcript_path,
                     endpoint] {
    if (command->empty() && !*repl)
      throw CLI::RequiredError("--command or --repl");

    plan::WorldState world = plan::load_world_file(*world_path);

    auto backend_for = [&](const std::string& text) -> plan::Backend {
      if (*backend_name == "rule") return plan::make_rule_backend(text);
      plan::LlmConfig config;
      config.endpoint = *endpoint;
      if (const char* key = std::getenv("LLM_API_KEY")) config.api_key = key;
      if (config.endpoint.empty())
        raise(ErrorCode::invalid_config,
              "llm backend needs --endpoint or LLM_ENDPOINT");
      return plan::make_llm_backend(config);
    };

    std::ofstream transcript_file;
    if (!transcript_path->empty()) {
      transcript_file.open(*transcript_path, std::ios::binary);
      if (!transcript_file)
        raise(ErrorCode::io_error, "cannot write " + *transcript_path);
    }

    if (!*repl) {
      const plan::Transcript t =
          plan::plan_and_execute(*command, world, backend_for(*command));
      const json j = plan::transcript_to_json(t);
      if (g.json_mode()) {
        *g.out << j.dump(2) << "\n";
      } else {
        transcript_text(t, *g.out);
      }
      if (transcript_file) transcript_file << j.dump(2) << "\n";
      return;
    }

    std::string line;
    while (std::getline(*g.in, line)) {
      std::string trimmed = line;
      while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
        trimmed.pop_back();
      if (trimmed.empty()) continue;
      try {
        const plan::Transcript t =
            plan::plan_and_execute(trimmed, world, backend_for(trimmed));
        for (const plan::StepRecord& step : t.steps) plan::apply_delta(world, step.delta);
        const json j = plan::transcript_to_json(t);
        if (g.json_mode())
          *g.out << j.dump() << "\n";
        else
          transcript_text(t, *g.out);
        if (transcript_file) transcript_file << j.dump() << "\n";
      } catch (const Error& e) {
        // One bad command should not end the session.
        if (g.json_mode())
          *g.err << json{{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}}
                        .dump()
                 << "\n";
        else
          *g.err << "error: " << e.what() << "\n";
      }
    }
  });
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Global g;
  g.in = &in;
  g.out = &out;
  g.err = &err;

  CLI::App app{"Household robot toolkit: semantic maps, grasp estimation, gesture "
               "classification, synthetic scene datasets, and command planning"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for color assignment and data generation")
      ->capture_default_str();

  add_map_commands(*app.add_subcommand("map", "Semantic map queries and rendering")
                        ->require_subcommand(1),
                   g);
  add_grasp_command(*app.add_subcommand("grasp", "Grasp pose from depth and masks"), g);
  add_esn_commands(
      *app.add_subcommand("esn", "Gesture classifier: generate, train, evaluate")
           ->require_subcommand(1),
      g);
  add_scenegen_command(
      *app.add_subcommand("scenegen", "Synthetic annotated scene dataset"), g);
  add_plan_command(*app.add_subcommand("plan", "Execute a command against a world"), g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    if (g.json_mode())
      err << json{{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}}.dump()
          << "\n";
    else
      err << "error: " << e.what() << "\n";
    return error_exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace homecore::cli
