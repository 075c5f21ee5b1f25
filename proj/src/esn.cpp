#include "homecore/esn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "homecore/error.hpp"
#include "homecore/rng.hpp"

namespace homecore::esn {

using nlohmann::json;

std::vector<double> normalize_skeleton(const SkeletonFrame& frame) {
  for (const char* id : kRequiredJoints)
    if (frame.joints.find(id) == frame.joints.end())
      raise(ErrorCode::missing_joint, std::string("skeleton frame missing joint '") + id + "'");

  const geom::Point2 neck = frame.joints.at("neck");
  const geom::Point2 ls = frame.joints.at("left_shoulder");
  const geom::Point2 rs = frame.joints.at("right_shoulder");
  const double scale = geom::norm(rs - ls);
  if (scale <= 1e-6)
    raise(ErrorCode::degenerate_scale, "shoulder distance too small to normalize");

  std::vector<double> out;
  out.reserve(10);
  for (const char* id : kRequiredJoints) {
    const geom::Point2 p = (frame.joints.at(id) - neck) * (1.0 / scale);
    out.push_back(p.x);
    out.push_back(p.y);
  }
  return out;
}

double fingertip_energy(const FingertipPatch& patch) {
  const std::size_t expected = static_cast<std::size_t>(patch.width) * patch.height;
  if (patch.width < 1 || patch.height < 1 || patch.values.size() != expected)
    raise(ErrorCode::empty_patch, "fingertip patch is empty or inconsistent");
  double sum = 0.0;
  for (double v : patch.values) sum += v;
  return sum / static_cast<double>(patch.values.size());
}

std::vector<double> make_feature(const SkeletonFrame& frame, const FingertipPatch& patch) {
  std::vector<double> feature = normalize_skeleton(frame);
  feature.push_back(fingertip_energy(patch));
  return feature;
}

const char* label_name(Label label) {
  return label == Label::Waving ? "waving" : "not_waving";
}

void EsnConfig::validate() const {
  if (n_reservoir < 1) raise(ErrorCode::invalid_config, "n_reservoir must be >= 1");
  if (!(spectral_radius > 0.0 && spectral_radius < 1.0))
    raise(ErrorCode::invalid_config, "spectral_radius must be in (0, 1)");
  if (!(leak_rate > 0.0 && leak_rate <= 1.0))
    raise(ErrorCode::invalid_config, "leak_rate must be in (0, 1]");
  if (!(connectivity > 0.0 && connectivity <= 1.0))
    raise(ErrorCode::invalid_config, "connectivity must be in (0, 1]");
  if (!(input_scaling >= 0.0) || !std::isfinite(input_scaling))
    raise(ErrorCode::invalid_config, "input_scaling must be finite and >= 0");
  if (!(ridge >= 0.0)) raise(ErrorCode::invalid_config, "ridge must be >= 0");
}

Esn init_esn(const EsnConfig& config, int input_dim) {
  config.validate();
  if (input_dim < 1) raise(ErrorCode::invalid_config, "input_dim must be >= 1");

  const int n = config.n_reservoir;
  Esn esn;
  esn.config = config;
  esn.input_dim = input_dim;
  esn.w_res = Matrix(n, n);

  bool scaled = false;
  for (int attempt = 0; attempt < 8 && !scaled; ++attempt) {
    Rng rng(mix_seed(config.seed, 100 + attempt));
    for (double& entry : esn.w_res.a) {
      if (rng.uniform() < config.connectivity)
        entry = rng.uniform() < 0.5 ? -1.0 : 1.0;
      else
        entry = 0.0;
    }
    const double radius = spectral_radius(esn.w_res, 1e-10);
    if (radius > 1e-12) {
      const double factor = config.spectral_radius / radius;
      for (double& entry : esn.w_res.a) entry *= factor;
      scaled = true;
    }
  }
  if (!scaled)
    raise(ErrorCode::zero_spectral_radius,
          "sampled reservoir is nilpotent to tolerance after 8 attempts");

  Rng rng_in(mix_seed(config.seed, 1));
  esn.w_in = Matrix(n, input_dim);
  for (double& entry : esn.w_in.a)
    entry = rng_in.uniform(-config.input_scaling, config.input_scaling);

  esn.state.assign(n, 0.0);
  return esn;
}

void step_state(const Esn& esn, std::vector<double>& x, const std::vector<double>& u) {
  const int n = esn.config.n_reservoir;
  if (static_cast<int>(u.size()) != esn.input_dim)
    raise(ErrorCode::dimension_mismatch,
          "feature vector has dimension " + std::to_string(u.size()) + ", expected " +
              std::to_string(esn.input_dim));
  if (static_cast<int>(x.size()) != n)
    raise(ErrorCode::dimension_mismatch, "state buffer has wrong dimension");

  const double alpha = esn.config.leak_rate;
  std::vector<double> pre(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const double* row = &esn.w_res.a[static_cast<std::size_t>(i) * n];
    for (int j = 0; j < n; ++j) acc += row[j] * x[j];
    const double* in_row = &esn.w_in.a[static_cast<std::size_t>(i) * esn.input_dim];
    for (int j = 0; j < esn.input_dim; ++j) acc += in_row[j] * u[j];
    pre[i] = acc;
  }
  for (int i = 0; i < n; ++i) x[i] = (1.0 - alpha) * x[i] + alpha * std::tanh(pre[i]);
}

const std::vector<double>& update(Esn& esn, const std::vector<double>& u) {
  step_state(esn, esn.state, u);
  return esn.state;
}

void reset_state(Esn& esn) { esn.state.assign(esn.config.n_reservoir, 0.0); }

namespace {

// Sequences shorter than the washout still contribute their settled tail:
// the first min(kWashout, len-1) states are discarded.
std::size_t washout_for(std::size_t frames) {
  if (frames == 0) return 0;
  return std::min<std::size_t>(kWashout, frames - 1);
}

void collect_states(const Esn& esn, const std::vector<std::vector<double>>& frames,
                    std::vector<std::vector<double>>& out) {
  std::vector<double> x(esn.config.n_reservoir, 0.0);
  const std::size_t skip = washout_for(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    step_state(esn, x, frames[t]);
    if (t >= skip) out.push_back(x);
  }
}

}  // namespace

void fit_readout(Esn& esn, const std::vector<LabeledSequence>& sequences) {
  bool has_waving = false, has_not = false;
  std::size_t total_states = 0;
  for (const LabeledSequence& seq : sequences) {
    if (seq.frames.empty())
      raise(ErrorCode::validation_error, "training sequence with no frames");
    (seq.label == Label::Waving ? has_waving : has_not) = true;
    total_states += seq.frames.size() - washout_for(seq.frames.size());
  }
  if (!has_waving || !has_not)
    raise(ErrorCode::missing_class, "training data must contain both labels");

  const int n = esn.config.n_reservoir;
  Matrix s(static_cast<int>(total_states), n);
  std::vector<double> y;
  y.reserve(total_states);

  std::size_t row = 0;
  std::vector<std::vector<double>> states;
  for (const LabeledSequence& seq : sequences) {
    states.clear();
    collect_states(esn, seq.frames, states);
    const double target = seq.label == Label::Waving ? 1.0 : -1.0;
    for (const std::vector<double>& x : states) {
      std::copy(x.begin(), x.end(), s.a.begin() + static_cast<std::ptrdiff_t>(row) * n);
      y.push_back(target);
      ++row;
    }
  }

  Matrix normal = gram(s);
  for (int i = 0; i < n; ++i) normal.a[static_cast<std::size_t>(i) * n + i] += esn.config.ridge;
  const std::vector<double> rhs = transpose_matvec(s, y);
  esn.w_out = cholesky_solve_spd(normal, rhs);
  esn.trained = true;
}

Classification classify(const Esn& esn, const std::vector<std::vector<double>>& frames) {
  if (!esn.trained) raise(ErrorCode::untrained_model, "readout has not been trained");
  if (frames.empty()) raise(ErrorCode::empty_input, "no frames to classify");

  std::vector<std::vector<double>> states;
  collect_states(esn, frames, states);

  double score = 0.0;
  for (const std::vector<double>& x : states) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += esn.w_out[i] * x[i];
    score += acc;
  }
  score /= static_cast<double>(states.size());

  Classification result;
  result.score = score;
  result.label = score > 0.0 ? Label::Waving : Label::NotWaving;
  return result;
}

namespace {

constexpr double kFps = 30.0;
constexpr int kSequenceFrames = 100;

SkeletonFrame base_pose(const geom::Point2& origin, double scale) {
  SkeletonFrame frame;
  frame.joints["neck"] = origin;
  frame.joints["left_shoulder"] = origin + geom::Point2{-45.0, 10.0} * scale;
  frame.joints["right_shoulder"] = origin + geom::Point2{45.0, 10.0} * scale;
  frame.joints["left_wrist"] = origin + geom::Point2{-55.0, 120.0} * scale;
  frame.joints["right_wrist"] = origin + geom::Point2{55.0, 120.0} * scale;
  return frame;
}

}  // namespace

std::vector<LabeledSequence> gen_dataset(int count, std::uint64_t seed, int start) {
  if (count < 0 || start < 0)
    raise(ErrorCode::validation_error, "dataset count and start must be nonnegative");

  std::vector<LabeledSequence> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int index = start + k;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
    const bool waving = index % 2 == 0;

    const geom::Point2 origin{rng.uniform(100.0, 400.0), rng.uniform(100.0, 300.0)};
    const double scale = rng.uniform(0.7, 1.6);
    const double amplitude = rng.uniform(20.0, 60.0);
    const double freq = rng.uniform(0.5, 2.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

    LabeledSequence seq;
    seq.label = waving ? Label::Waving : Label::NotWaving;
    seq.frames.reserve(kSequenceFrames);
    for (int t = 0; t < kSequenceFrames; ++t) {
      SkeletonFrame frame = base_pose(origin, scale);
      double motion = 0.0;
      if (waving) {
        const double arg = 2.0 * std::numbers::pi * freq * t / kFps + phase;
        motion = std::sin(arg);
        // Waving arm raised above the shoulder, oscillating sideways.
        frame.joints["right_wrist"] =
            origin + geom::Point2{60.0 + amplitude * motion, -40.0} * scale;
      }
      std::vector<double> feature = normalize_skeleton(frame);
      for (double& v : feature) v += rng.normal(0.0, 0.02);

      double energy = waving ? 0.25 + 0.5 * std::abs(motion) + rng.normal(0.0, 0.05)
                             : 0.05 + rng.normal(0.0, 0.02);
      feature.push_back(std::clamp(energy, 0.0, 1.0));
      seq.frames.push_back(std::move(feature));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::string dataset_to_jsonl(const std::vector<LabeledSequence>& sequences) {
  std::string out;
  for (const LabeledSequence& seq : sequences) {
    json line{{"label", label_name(seq.label)}, {"frames", seq.frames}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<LabeledSequence> dataset_from_jsonl(const std::string& text) {
  std::vector<LabeledSequence> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json root;
    try {
      root = json::parse(line);
    } catch (const json::parse_error& e) {
      raise(ErrorCode::parse_error,
            "dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!root.contains("label") || !root["label"].is_string() || !root.contains("frames") ||
        !root["frames"].is_array())
      raise(ErrorCode::parse_error,
            "dataset line " + std::to_string(line_no) + ": need label and frames");
    LabeledSequence seq;
    const std::string label = root["label"].get<std::string>();
    if (label == "waving")
      seq.label = Label::Waving;
    else if (label == "not_waving")
      seq.label = Label::NotWaving;
    else
      raise(ErrorCode::parse_error,
            "dataset line " + std::to_string(line_no) + ": unknown label '" + label + "'");
    for (const json& frame : root["frames"]) {
      if (!frame.is_array() || frame.empty())
        raise(ErrorCode::parse_error,
              "dataset line " + std::to_string(line_no) + ": malformed frame");
      try {
        seq.frames.push_back(frame.get<std::vector<double>>());
      } catch (const json::exception&) {
        raise(ErrorCode::parse_error,
              "dataset line " + std::to_string(line_no) + ": non-numeric frame entry");
      }
    }
    if (seq.frames.empty())
      raise(ErrorCode::parse_error,
            "dataset line " + std::to_string(line_no) + ": sequence has no frames");
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<LabeledSequence> load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open dataset file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return dataset_from_jsonl(buffer.str());
}

void save_dataset_file(const std::vector<LabeledSequence>& sequences, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write dataset file " + path);
  out << dataset_to_jsonl(sequences);
  if (!out) raise(ErrorCode::io_error, "failed writing dataset file " + path);
}

EsnConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::parse_error, std::string("config JSON: ") + e.what());
  }
  if (!root.is_object()) raise(ErrorCode::parse_error, "config JSON: expected an object");

  EsnConfig config;
  try {
    config.n_reservoir = root.value("n_reservoir", config.n_reservoir);
    config.spectral_radius = root.value("spectral_radius", config.spectral_radius);
    config.input_scaling = root.value("input_scaling", config.input_scaling);
    config.leak_rate = root.value("leak_rate", config.leak_rate);
    config.connectivity = root.value("connectivity", config.connectivity);
    config.ridge = root.value("ridge", config.ridge);
    config.seed = root.value("seed", config.seed);
  } catch (const json::exception& e) {
    raise(ErrorCode::parse_error, std::string("config JSON: ") + e.what());
  }
  config.validate();
  return config;
}

EsnConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

std::string model_to_json(const Esn& esn) {
  json root;
  root["format"] = "esn-model";
  root["version"] = 1;
  root["config"] = {{"n_reservoir", esn.config.n_reservoir},
                    {"spectral_radius", esn.config.spectral_radius},
                    {"input_scaling", esn.config.input_scaling},
                    {"leak_rate", esn.config.leak_rate},
                    {"connectivity", esn.config.connectivity},
                    {"ridge", esn.config.ridge},
                    {"seed", esn.config.seed}};
  root["input_dim"] = esn.input_dim;
  root["w_in"] = esn.w_in.a;
  root["w_res"] = esn.w_res.a;
  root["trained"] = esn.trained;
  if (esn.trained) root["w_out"] = esn.w_out;
  return root.dump() + "\n";
}

Esn model_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::parse_error, std::string("model JSON: ") + e.what());
  }
  if (!root.is_object() || root.value("format", "") != "esn-model")
    raise(ErrorCode::parse_error, "model JSON: unrecognized format tag");

  Esn esn;
  try {
    const json& c = root.at("config");
    esn.config.n_reservoir = c.at("n_reservoir").get<int>();
    esn.config.spectral_radius = c.at("spectral_radius").get<double>();
    esn.config.input_scaling = c.at("input_scaling").get<double>();
    esn.config.leak_rate = c.at("leak_rate").get<double>();
    esn.config.connectivity = c.at("connectivity").get<double>();
    esn.config.ridge = c.at("ridge").get<double>();
    esn.config.seed = c.at("seed").get<std::uint64_t>();
    esn.config.validate();

    esn.input_dim = root.at("input_dim").get<int>();
    const int n = esn.config.n_reservoir;
    esn.w_in = Matrix(n, esn.input_dim);
    esn.w_res = Matrix(n, n);
    const auto w_in = root.at("w_in").get<std::vector<double>>();
    const auto w_res = root.at("w_res").get<std::vector<double>>();
    if (w_in.size() != esn.w_in.a.size() || w_res.size() != esn.w_res.a.size())
      raise(ErrorCode::parse_error, "model JSON: weight array sizes do not match config");
    esn.w_in.a = w_in;
    esn.w_res.a = w_res;
    esn.trained = root.value("trained", false);
    if (esn.trained) {
      esn.w_out = root.at("w_out").get<std::vector<double>>();
      if (esn.w_out.size() != static_cast<std::size_t>(n))
        raise(ErrorCode::parse_error, "model JSON: readout size does not match config");
    }
    esn.state.assign(n, 0.0);
  } catch (const json::exception& e) {
    raise(ErrorCode::parse_error, std::string("model JSON: ") + e.what());
  }
  return esn;
}

Esn load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open model file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

void save_model_file(const Esn& esn, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write model file " + path);
  out << model_to_json(esn);
  if (!out) raise(ErrorCode::io_error, "failed writing model file " + path);
}

}  // namespace homecore::esn
