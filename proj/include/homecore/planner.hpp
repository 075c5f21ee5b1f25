#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "homecore/linalg.hpp"
#include "homecore/semantic_map.hpp"

namespace homecore::plan {

// Closed skill set. The planner can never execute anything outside it.
enum class Skill {
  find_obj,
  grasp,
  move,
  place,
  hand_over,
  find_person,
  follow_person,
  speak,
  ask,
  answer,
  open_door,
  wait,
};

inline constexpr int kSkillCount = 12;
inline constexpr int kStepCap = 20;
inline constexpr double kGraspRange = 1.0;   // meters
inline constexpr double kPersonRange = 1.0;  // meters
inline constexpr double kPersonStandoff = 0.5;

const char* skill_name(Skill skill);
std::optional<Skill> skill_from_name(const std::string& name);

struct SkillCall {
  Skill skill = Skill::wait;
  nlohmann::json args = nlohmann::json::object();
};

struct WorldObject {
  std::string name;
  std::string cls;
  Vec3 pose{0.0, 0.0, 0.0};
  std::string surface;
  std::array<double, 3> dims{0.06, 0.06, 0.12};  // x, y, vertical
};

struct Person {
  std::string name;
  geom::Point2 pose;
};

struct RobotState {
  semmap::Pose2 pose;
  std::string room;
  std::optional<WorldObject> held;
};

struct WorldState {
  semmap::SemanticMap map;
  std::vector<WorldObject> objects;
  std::vector<Person> persons;
  RobotState robot;
  std::string operator_name;
  std::set<std::string> open_doors;
  std::optional<std::string> focus_surface;
  std::optional<std::string> found_object;
  std::vector<std::string> said;
  double elapsed = 0.0;

  const WorldObject* find_object(const std::string& name) const;
  const Person* find_person(const std::string& name) const;
  void validate() const;
};

WorldState load_world(const std::string& json_text);
WorldState load_world_file(const std::string& path);

// Dynamic portion of the world (everything a skill may change); the map and
// the person list are static and omitted.
nlohmann::json world_to_json(const WorldState& world);

enum class Status { Done, Failed, StepLimit };

const char* status_name(Status status);

struct StepRecord {
  SkillCall call;
  nlohmann::json delta;  // null when the call failed validation
  std::string outcome;
};

struct Transcript {
  std::string command;
  std::vector<StepRecord> steps;
  Status status = Status::Done;
  std::string failure_reason;
  nlohmann::json final_world;
};

nlohmann::json transcript_to_json(const Transcript& transcript);

// Empty when the call may execute; otherwise machine-checkable violation tags
// ("UnknownLocation", "HandOccupied", ...) with details.
std::vector<std::string> validate_call(const SkillCall& call, const WorldState& world);

struct ExecResult {
  bool ok = true;
  std::string outcome;
  nlohmann::json delta;
};

// Executes a validated call, mutating the world and returning a replayable
// delta. Raises precondition_failed if validate_call rejects the call.
ExecResult execute_skill(const SkillCall& call, WorldState& world);

// Applies a recorded delta; replaying all deltas of a transcript onto the
// initial world reproduces the final world exactly.
void apply_delta(WorldState& world, const nlohmann::json& delta);

WorldState replay(WorldState initial, const Transcript& transcript);

struct BackendContext {
  std::string command;
  const WorldState* world = nullptr;
  std::vector<std::pair<SkillCall, std::string>> history;
};

struct BackendReply {
  bool done = false;
  SkillCall call;
};

using Backend = std::function<BackendReply(const BackendContext&)>;

Transcript plan_and_execute(const std::string& command, WorldState world,
                            const Backend& backend, int step_cap = kStepCap);

// Deterministic template grammar over common household commands; throws
// unparsable_command listing the supported templates.
std::vector<SkillCall> parse_command(const std::string& text);

Backend make_rule_backend(const std::string& command);

struct LlmConfig {
  std::string endpoint;
  std::string api_key;
  double timeout_s = 30.0;
  int max_retries = 2;
};

Backend make_llm_backend(const LlmConfig& config);

// Prompt fragments shared by the HTTP backend and its tests.
std::string skill_catalog_text();
std::string observation_text(const WorldState& world);

}  // namespace homecore::plan
