#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "homecore/geometry.hpp"
#include "homecore/linalg.hpp"

namespace homecore::esn {

// Feature layout: 5 joints x 2 normalized coordinates, then one fingertip
// energy scalar.
inline constexpr const char* kRequiredJoints[5] = {"neck", "left_shoulder",
                                                   "right_shoulder", "left_wrist",
                                                   "right_wrist"};
inline constexpr int kFeatureDim = 11;
inline constexpr int kWashout = 20;

struct SkeletonFrame {
  std::map<std::string, geom::Point2> joints;
};

struct FingertipPatch {
  int width = 0;
  int height = 0;
  std::vector<double> values;
};

// Joints translated to the neck and scaled by the shoulder distance; exactly
// translation- and uniform-scale-invariant.
std::vector<double> normalize_skeleton(const SkeletonFrame& frame);

// Mean pixel intensity, in [0,1] for valid patches.
double fingertip_energy(const FingertipPatch& patch);

std::vector<double> make_feature(const SkeletonFrame& frame, const FingertipPatch& patch);

enum class Label { NotWaving = 0, Waving = 1 };

const char* label_name(Label label);

struct LabeledSequence {
  std::vector<std::vector<double>> frames;
  Label label = Label::NotWaving;
};

struct EsnConfig {
  int n_reservoir = 100;
  double spectral_radius = 0.9;
  double input_scaling = 0.5;
  double leak_rate = 0.3;
  double connectivity = 0.1;
  double ridge = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

// Any subset of the config fields may appear; the rest keep their defaults.
EsnConfig config_from_json(const std::string& text);
EsnConfig load_config_file(const std::string& path);

struct Esn {
  EsnConfig config;
  int input_dim = 0;
  Matrix w_in;   // n_reservoir x input_dim
  Matrix w_res;  // n_reservoir x n_reservoir
  std::vector<double> w_out;
  bool trained = false;
  std::vector<double> state;
};

// Random sparse +/-1 reservoir rescaled to the configured spectral radius;
// deterministic per seed.
Esn init_esn(const EsnConfig& config, int input_dim);

// x <- (1-alpha) x + alpha tanh(W_res x + W_in u), on a caller-owned buffer.
void step_state(const Esn& esn, std::vector<double>& x, const std::vector<double>& u);

// Same update applied to the network's own state; returns the new state.
const std::vector<double>& update(Esn& esn, const std::vector<double>& u);

void reset_state(Esn& esn);

// Ridge regression (S^T S + lambda I) w = S^T y over post-washout states of
// all sequences, labels +/-1. Stores the readout on the network.
void fit_readout(Esn& esn, const std::vector<LabeledSequence>& sequences);

struct Classification {
  Label label = Label::NotWaving;
  double score = 0.0;
};

Classification classify(const Esn& esn, const std::vector<std::vector<double>>& frames);

// Synthetic benchmark data: waving = sinusoidal right-wrist x motion,
// not-waving = static pose; both with Gaussian feature noise and a
// motion-correlated fingertip energy channel. Sequence `start + i` is a pure
// function of (seed, start + i); even global indices are waving.
std::vector<LabeledSequence> gen_dataset(int count, std::uint64_t seed, int start = 0);

std::string dataset_to_jsonl(const std::vector<LabeledSequence>& sequences);
std::vector<LabeledSequence> dataset_from_jsonl(const std::string& text);
std::vector<LabeledSequence> load_dataset_file(const std::string& path);
void save_dataset_file(const std::vector<LabeledSequence>& sequences, const std::string& path);

std::string model_to_json(const Esn& esn);
Esn model_from_json(const std::string& text);
Esn load_model_file(const std::string& path);
void save_model_file(const Esn& esn, const std::string& path);

}  // namespace homecore::esn
