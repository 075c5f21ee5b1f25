#include "homecore/planner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "homecore/error.hpp"
#include "homecore/grasp.hpp"

namespace homecore::plan {

using nlohmann::json;

namespace {

constexpr const char* kSkillNames[kSkillCount] = {
    "find_obj", "grasp",  "move",   "place",  "hand_over", "find_person",
    "follow_person", "speak", "ask", "answer", "open_door", "wait"};

}  // namespace

const char* skill_name(Skill skill) { return kSkillNames[static_cast<int>(skill)]; }

std::optional<Skill> skill_from_name(const std::string& name) {
  for (int i = 0; i < kSkillCount; ++i)
    if (name == kSkillNames[i]) return static_cast<Skill>(i);
  return std::nullopt;
}

const char* status_name(Status status) {
  switch (status) {
    case Status::Done: return "done";
    case Status::Failed: return "failed";
    case Status::StepLimit: return "step_limit";
  }
  return "unknown";
}

const WorldObject* WorldState::find_object(const std::string& name) const {
  for (const WorldObject& o : objects)
    if (o.name == name) return &o;
  return nullptr;
}

const Person* WorldState::find_person(const std::string& name) const {
  for (const Person& p : persons)
    if (p.name == name) return &p;
  return nullptr;
}

void WorldState::validate() const {
  map.validate();
  for (const WorldObject& o : objects) {
    if (o.name.empty())
      raise(ErrorCode::validation_error, "object with empty name");
    if (map.find_furniture(o.surface) == nullptr)
      raise(ErrorCode::validation_error,
            "object '" + o.name + "' sits on unknown furniture '" + o.surface + "'");
  }
  for (std::size_t i = 0; i < objects.size(); ++i)
    for (std::size_t j = i + 1; j < objects.size(); ++j)
      if (objects[i].name == objects[j].name)
        raise(ErrorCode::validation_error, "duplicate object name '" + objects[i].name + "'");
  for (std::size_t i = 0; i < persons.size(); ++i)
    for (std::size_t j = i + 1; j < persons.size(); ++j)
      if (persons[i].name == persons[j].name)
        raise(ErrorCode::validation_error, "duplicate person name '" + persons[i].name + "'");
  if (find_person(operator_name) == nullptr)
    raise(ErrorCode::validation_error,
          "operator '" + operator_name + "' is not in the person list");
}

namespace {

Vec3 parse_vec3(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3)
    raise(ErrorCode::parse_error, context + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

geom::Point2 parse_point2(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2)
    raise(ErrorCode::parse_error, context + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string resolve_room(const WorldState& world, const geom::Point2& position) {
  const semmap::LocateResult hit = semmap::locate(world.map, position);
  return hit.room.value_or("");
}

}  // namespace

WorldState load_world(const std::string& json_text) {
  WorldState world;
  world.map = semmap::load_map(json_text);

  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::parse_error, std::string("world JSON: ") + e.what());
  }

  try {
    for (const json& o : root.value("objects", json::array())) {
      WorldObject obj;
      obj.name = o.at("name").get<std::string>();
      obj.cls = o.value("class", obj.name);
      obj.pose = parse_vec3(o.at("pose"), "object '" + obj.name + "' pose");
      obj.surface = o.at("surface").get<std::string>();
      if (o.contains("dims")) {
        const json& d = o["dims"];
        if (!d.is_array() || d.size() != 3)
          raise(ErrorCode::parse_error, "object '" + obj.name + "' dims must be [x, y, z]");
        for (int i = 0; i < 3; ++i) obj.dims[static_cast<std::size_t>(i)] = d[i].get<double>();
      }
      world.objects.push_back(std::move(obj));
    }
    for (const json& p : root.value("persons", json::array())) {
      Person person;
      person.name = p.at("name").get<std::string>();
      person.pose = parse_point2(p.at("pose"), "person '" + person.name + "' pose");
      world.persons.push_back(std::move(person));
    }
    world.operator_name = root.value("operator", "");

    const json& robot = root.at("robot");
    const json& pose = robot.at("pose");
    if (!pose.is_array() || pose.size() != 3)
      raise(ErrorCode::parse_error, "robot pose must be [x, y, yaw]");
    world.robot.pose.position = {pose[0].get<double>(), pose[1].get<double>()};
    world.robot.pose.yaw = geom::wrap_angle(pose[2].get<double>());
    if (robot.contains("held") && !robot["held"].is_null()) {
      const std::string held = robot["held"].get<std::string>();
      auto it = std::find_if(world.objects.begin(), world.objects.end(),
                             [&](const WorldObject& o) { return o.name == held; });
      if (it == world.objects.end())
        raise(ErrorCode::parse_error, "robot holds unknown object '" + held + "'");
      world.robot.held = *it;
      world.objects.erase(it);
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::parse_error, std::string("world JSON: ") + e.what());
  }

  world.validate();
  world.robot.room = resolve_room(world, world.robot.pose.position);
  return world;
}

WorldState load_world_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open world file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_world(buffer.str());
}

json world_to_json(const WorldState& world) {
  json root;
  root["robot"] = {{"pose",
                    {world.robot.pose.position.x, world.robot.pose.position.y,
                     world.robot.pose.yaw}},
                   {"room", world.robot.room}};
  if (world.robot.held) {
    const WorldObject& o = *world.robot.held;
    root["robot"]["held"] = {{"name", o.name}, {"class", o.cls},
                             {"dims", o.dims}};
  } else {
    root["robot"]["held"] = nullptr;
  }
  root["objects"] = json::array();
  for (const WorldObject& o : world.objects)
    root["objects"].push_back({{"name", o.name},
                               {"class", o.cls},
                               {"pose", {o.pose.x, o.pose.y, o.pose.z}},
                               {"surface", o.surface}});
  root["focus_surface"] = world.focus_surface ? json(*world.focus_surface) : json(nullptr);
  root["found_object"] = world.found_object ? json(*world.found_object) : json(nullptr);
  root["open_doors"] = world.open_doors;
  root["said"] = world.said;
  root["elapsed"] = world.elapsed;
  return root;
}

json transcript_to_json(const Transcript& transcript) {
  json root;
  root["command"] = transcript.command;
  root["status"] = status_name(transcript.status);
  if (transcript.status != Status::Done) root["failure_reason"] = transcript.failure_reason;
  root["steps"] = json::array();
  for (const StepRecord& step : transcript.steps)
    root["steps"].push_back({{"skill", skill_name(step.call.skill)},
                             {"args", step.call.args},
                             {"outcome", step.outcome},
                             {"delta", step.delta}});
  root["final_world"] = transcript.final_world;
  return root;
}

namespace {

struct ArgSpec {
  const char* key;
  bool numeric;
};

// One entry per skill, in enum order.
const std::vector<ArgSpec>& arg_schema(Skill skill) {
  static const std::vector<ArgSpec> schemas[kSkillCount] = {
      {{"description", false}},  // find_obj
      {{"object", false}},       // grasp
      {{"location", false}},     // move
      {{"surface", false}},      // place
      {},                        // hand_over
      {{"name", false}},         // find_person
      {{"name", false}},         // follow_person
      {{"text", false}},         // speak
      {{"question", false}},     // ask
      {{"text", false}},         // answer
      {{"door", false}},         // open_door
      {{"seconds", true}},       // wait
  };
  return schemas[static_cast<int>(skill)];
}

double robot_distance(const WorldState& world, const geom::Point2& p) {
  return geom::distance(world.robot.pose.position, p);
}

const Person* resolve_person(const WorldState& world, const std::string& name) {
  if (name == "operator") return world.find_person(world.operator_name);
  return world.find_person(name);
}

// Furniture whose polygon or centroid is close enough to act on.
bool near_surface(const WorldState& world, const semmap::Furniture& furniture,
                  double range) {
  return robot_distance(world, furniture.contour.centroid()) <= range ||
         furniture.contour.boundary_distance(world.robot.pose.position) <= range;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct DescriptionQuery {
  enum class Qualifier { Closest, RightMost, LeftMost } qualifier = Qualifier::Closest;
  std::vector<std::string> tokens;  // class/name words that must all match
};

DescriptionQuery parse_description(const std::string& description) {
  DescriptionQuery query;
  std::string text = lower(description);
  auto strip = [&text](const char* phrase) {
    const std::size_t at = text.find(phrase);
    if (at == std::string::npos) return false;
    text.erase(at, std::string(phrase).size());
    return true;
  };
  if (strip("right-most") || strip("rightmost"))
    query.qualifier = DescriptionQuery::Qualifier::RightMost;
  else if (strip("left-most") || strip("leftmost"))
    query.qualifier = DescriptionQuery::Qualifier::LeftMost;
  else if (strip("closest") || strip("nearest"))
    query.qualifier = DescriptionQuery::Qualifier::Closest;

  static const std::set<std::string> kStopWords = {"the",  "a",     "an",    "object",
                                                   "objects", "item", "items", "thing",
                                                   "things"};
  std::string token;
  for (char c : text + " ") {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      token += c;
    } else if (!token.empty()) {
      if (kStopWords.find(token) == kStopWords.end()) query.tokens.push_back(token);
      token.clear();
    }
  }
  return query;
}

bool object_matches(const WorldObject& object, const DescriptionQuery& query) {
  const std::string name = lower(object.name);
  const std::string cls = lower(object.cls);
  for (const std::string& token : query.tokens)
    if (name.find(token) == std::string::npos && cls.find(token) == std::string::npos)
      return false;
  return true;
}

// "found" targets the last find_obj hit; otherwise an exact object name, or a
// description the found object satisfies (so grasp(cup) works after
// find_obj(cup) located "cup0").
const WorldObject* resolve_grasp_target(const WorldState& world, const std::string& arg,
                                        std::vector<std::string>* violations) {
  if (arg == "found") {
    if (!world.found_object) {
      if (violations) violations->push_back("NothingFound: no object has been found yet");
      return nullptr;
    }
    const WorldObject* target = world.find_object(*world.found_object);
    if (target == nullptr && violations)
      violations->push_back("UnknownObject: found object '" + *world.found_object +
                            "' is gone");
    return target;
  }
  if (const WorldObject* exact = world.find_object(arg)) return exact;
  if (world.found_object) {
    const WorldObject* found = world.find_object(*world.found_object);
    if (found != nullptr && object_matches(*found, parse_description(arg))) return found;
  }
  if (violations) violations->push_back("UnknownObject: '" + arg + "'");
  return nullptr;
}

}  // namespace

std::vector<std::string> validate_call(const SkillCall& call, const WorldState& world) {
  std::vector<std::string> violations;
  const std::vector<ArgSpec>& schema = arg_schema(call.skill);

  if (!call.args.is_object()) {
    violations.push_back("BadArguments: args must be a JSON object");
    return violations;
  }
  for (const ArgSpec& spec : schema) {
    if (!call.args.contains(spec.key)) {
      violations.push_back(std::string("BadArguments: missing '") + spec.key + "'");
      return violations;
    }
    const json& value = call.args.at(spec.key);
    if (spec.numeric ? !value.is_number() : !value.is_string()) {
      violations.push_back(std::string("BadArguments: '") + spec.key +
                           (spec.numeric ? "' must be a number" : "' must be a string"));
      return violations;
    }
    if (!spec.numeric && value.get<std::string>().empty()) {
      violations.push_back(std::string("BadArguments: '") + spec.key + "' must be nonempty");
      return violations;
    }
  }
  for (auto it = call.args.begin(); it != call.args.end(); ++it) {
    const bool known = std::any_of(schema.begin(), schema.end(),
                                   [&](const ArgSpec& s) { return it.key() == s.key; });
    if (!known) {
      violations.push_back("BadArguments: unexpected argument '" + it.key() + "'");
      return violations;
    }
  }

  switch (call.skill) {
    case Skill::move: {
      const std::string loc = call.args["location"].get<std::string>();
      if (world.map.find_furniture(loc) == nullptr && world.map.find_room(loc) == nullptr &&
          world.map.find_door(loc) == nullptr && resolve_person(world, loc) == nullptr)
        violations.push_back("UnknownLocation: '" + loc + "'");
      break;
    }
    case Skill::find_obj:
      break;
    case Skill::grasp: {
      const std::string name = call.args["object"].get<std::string>();
      const WorldObject* target = resolve_grasp_target(world, name, &violations);
      if (target == nullptr) break;
      if (world.robot.held) violations.push_back("HandOccupied: already holding an object");
      if (robot_distance(world, {target->pose.x, target->pose.y}) > kGraspRange)
        violations.push_back("OutOfRange: object is farther than 1.0 m");
      break;
    }
    case Skill::place: {
      const std::string surface = call.args["surface"].get<std::string>();
      const semmap::Furniture* furniture = world.map.find_furniture(surface);
      if (furniture == nullptr) {
        violations.push_back("UnknownLocation: '" + surface + "'");
        break;
      }
      if (!world.robot.held) violations.push_back("NothingHeld: hand is empty");
      if (!near_surface(world, *furniture, kGraspRange))
        violations.push_back("OutOfRange: surface is farther than 1.0 m");
      break;
    }
    case Skill::hand_over: {
      if (!world.robot.held) violations.push_back("NothingHeld: hand is empty");
      bool anyone = false;
      for (const Person& p : world.persons)
        anyone = anyone || robot_distance(world, p.pose) <= kPersonRange;
      if (!anyone) violations.push_back("NoPersonNearby: nobody within 1.0 m");
      break;
    }
    case Skill::find_person:
    case Skill::follow_person: {
      const std::string name = call.args["name"].get<std::string>();
      if (resolve_person(world, name) == nullptr)
        violations.push_back("UnknownPerson: '" + name + "'");
      break;
    }
    case Skill::open_door: {
      const std::string door = call.args["door"].get<std::string>();
      if (world.map.find_door(door) == nullptr)
        violations.push_back("UnknownDoor: '" + door + "'");
      break;
    }
    case Skill::wait: {
      const double seconds = call.args["seconds"].get<double>();
      if (!(seconds >= 0.0 && seconds <= 3600.0))
        violations.push_back("BadArguments: seconds must be in [0, 3600]");
      break;
    }
    case Skill::speak:
    case Skill::ask:
    case Skill::answer:
      break;
  }
  return violations;
}

namespace {

json pose_json(const semmap::Pose2& pose) {
  return json{pose.position.x, pose.position.y, pose.yaw};
}

ExecResult move_to(WorldState& world, const semmap::Pose2& pose,
                   const std::optional<std::string>& focus, const std::string& outcome) {
  world.robot.pose = pose;
  world.robot.room = resolve_room(world, pose.position);
  world.focus_surface = focus;
  ExecResult result;
  result.outcome = outcome;
  result.delta = {{"op", "move"},
                  {"pose", pose_json(pose)},
                  {"room", world.robot.room},
                  {"focus", focus ? json(*focus) : json(nullptr)}};
  return result;
}

semmap::Pose2 approach_person(const WorldState& world, const Person& person) {
  geom::Point2 dir = world.robot.pose.position - person.pose;
  const double len = geom::norm(dir);
  dir = len > 1e-9 ? dir * (1.0 / len) : geom::Point2{1.0, 0.0};
  semmap::Pose2 pose;
  pose.position = person.pose + dir * kPersonStandoff;
  pose.yaw = geom::wrap_angle(
      std::atan2(person.pose.y - pose.position.y, person.pose.x - pose.position.x));
  return pose;
}

ExecResult exec_move(const SkillCall& call, WorldState& world) {
  const std::string loc = call.args["location"].get<std::string>();
  if (world.map.find_furniture(loc) != nullptr) {
    const semmap::NavigationGoal goal = semmap::navigation_point(world.map, loc, 0.6);
    return move_to(world, goal.pose, loc, "at " + loc);
  }
  if (const Person* p = resolve_person(world, loc)) {
    return move_to(world, approach_person(world, *p), world.focus_surface,
                   "at " + p->name);
  }
  if (const semmap::Room* r = world.map.find_room(loc)) {
    semmap::Pose2 pose;
    pose.position = r->contour.centroid();
    const geom::Point2 d = pose.position - world.robot.pose.position;
    pose.yaw = geom::norm(d) > 1e-9 ? geom::wrap_angle(std::atan2(d.y, d.x))
                                    : world.robot.pose.yaw;
    return move_to(world, pose, std::nullopt, "in " + loc);
  }
  const semmap::Door* door = world.map.find_door(loc);
  semmap::Pose2 pose;
  pose.position = door->contour.centroid();
  const geom::Point2 d = pose.position - world.robot.pose.position;
  pose.yaw =
      geom::norm(d) > 1e-9 ? geom::wrap_angle(std::atan2(d.y, d.x)) : world.robot.pose.yaw;
  return move_to(world, pose, std::nullopt, "at " + loc);
}

ExecResult exec_find_obj(const SkillCall& call, WorldState& world) {
  const DescriptionQuery query =
      parse_description(call.args["description"].get<std::string>());

  std::vector<const WorldObject*> candidates;
  for (const WorldObject& o : world.objects) {
    if (world.focus_surface) {
      if (o.surface != *world.focus_surface) continue;
    } else {
      const semmap::Furniture* f = world.map.find_furniture(o.surface);
      if (f == nullptr || f->room != world.robot.room) continue;
    }
    if (object_matches(o, query)) candidates.push_back(&o);
  }
  if (candidates.empty()) {
    ExecResult result;
    result.ok = false;
    result.outcome = "NothingFound: no object matches '" +
                     call.args["description"].get<std::string>() + "'";
    return result;
  }

  // Egocentric frame: right axis is the heading rotated -90 degrees.
  const double yaw = world.robot.pose.yaw;
  const geom::Point2 right{std::sin(yaw), -std::cos(yaw)};
  const geom::Point2 base = world.robot.pose.position;

  const WorldObject* best = candidates.front();
  double best_key = 0.0;
  bool first = true;
  for (const WorldObject* o : candidates) {
    const geom::Point2 rel = geom::Point2{o->pose.x, o->pose.y} - base;
    double key = 0.0;
    switch (query.qualifier) {
      case DescriptionQuery::Qualifier::RightMost: key = -geom::dot(rel, right); break;
      case DescriptionQuery::Qualifier::LeftMost: key = geom::dot(rel, right); break;
      case DescriptionQuery::Qualifier::Closest: key = geom::norm(rel); break;
    }
    if (first || key < best_key) {
      best = o;
      best_key = key;
      first = false;
    }
  }

  world.found_object = best->name;
  ExecResult result;
  result.outcome = "found " + best->name;
  result.delta = {{"op", "find"}, {"found", best->name}};
  return result;
}

ExecResult exec_grasp(const SkillCall& call, WorldState& world) {
  const std::string name =
      resolve_grasp_target(world, call.args["object"].get<std::string>(), nullptr)->name;
  auto it = std::find_if(world.objects.begin(), world.objects.end(),
                         [&](const WorldObject& o) { return o.name == name; });
  const WorldObject object = *it;

  // Approach decision on a synthesized cloud of the object's box, seen from
  // the robot: camera x right, y down, z toward the object.
  const double distance =
      std::max(0.2, robot_distance(world, {object.pose.x, object.pose.y}));
  cloud::PointCloud box;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        box.points.push_back({sx * object.dims[0] / 2.0, sy * object.dims[2] / 2.0,
                              distance + sz * object.dims[1] / 2.0});
  const grasp::OrientedBBox3 bbox = grasp::pca_bbox(box);
  const grasp::GraspPose pose = grasp::decide_grasp(bbox);

  world.objects.erase(it);
  world.robot.held = object;
  if (world.found_object && *world.found_object == name) world.found_object.reset();

  ExecResult result;
  result.outcome = std::string("grasped ") + name + " from the " +
                   grasp::approach_name(pose.approach);
  result.delta = {{"op", "grasp"},
                  {"object", name},
                  {"approach", grasp::approach_name(pose.approach)}};
  return result;
}

ExecResult exec_place(const SkillCall& call, WorldState& world) {
  const std::string surface = call.args["surface"].get<std::string>();
  WorldObject object = *world.robot.held;
  const geom::Point2 c = world.map.find_furniture(surface)->contour.centroid();
  object.pose = {c.x, c.y, object.pose.z};
  object.surface = surface;
  world.robot.held.reset();
  world.objects.push_back(object);

  ExecResult result;
  result.outcome = "placed " + object.name + " on " + surface;
  result.delta = {{"op", "place"},
                  {"surface", surface},
                  {"pose", {object.pose.x, object.pose.y, object.pose.z}}};
  return result;
}

ExecResult exec_hand_over(WorldState& world) {
  const Person* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const Person& p : world.persons) {
    const double d = robot_distance(world, p.pose);
    if (d < best) {
      best = d;
      nearest = &p;
    }
  }
  const std::string object = world.robot.held->name;
  world.robot.held.reset();

  ExecResult result;
  result.outcome = "handed " + object + " to " + nearest->name;
  result.delta = {{"op", "hand_over"}, {"object", object}, {"person", nearest->name}};
  return result;
}

ExecResult exec_find_person(const SkillCall& call, WorldState& world) {
  const Person* person = resolve_person(world, call.args["name"].get<std::string>());
  const geom::Point2 d = person->pose - world.robot.pose.position;
  const double yaw =
      geom::norm(d) > 1e-9 ? geom::wrap_angle(std::atan2(d.y, d.x)) : world.robot.pose.yaw;
  world.robot.pose.yaw = yaw;

  ExecResult result;
  result.outcome = "found " + person->name;
  result.delta = {{"op", "find_person"}, {"name", person->name}, {"yaw", yaw}};
  return result;
}

ExecResult exec_follow_person(const SkillCall& call, WorldState& world) {
  const Person* person = resolve_person(world, call.args["name"].get<std::string>());
  ExecResult result = move_to(world, approach_person(world, *person), world.focus_surface,
                              "following " + person->name);
  return result;
}

ExecResult exec_say(const std::string& entry, WorldState& world) {
  world.said.push_back(entry);
  ExecResult result;
  result.outcome = entry;
  result.delta = {{"op", "say"}, {"text", entry}};
  return result;
}

ExecResult exec_open_door(const SkillCall& call, WorldState& world) {
  const std::string door = call.args["door"].get<std::string>();
  const bool already = world.open_doors.count(door) > 0;
  world.open_doors.insert(door);
  ExecResult result;
  result.outcome = already ? "door " + door + " was already open" : "opened " + door;
  result.delta = {{"op", "open_door"}, {"door", door}};
  return result;
}

ExecResult exec_wait(const SkillCall& call, WorldState& world) {
  const double seconds = call.args["seconds"].get<double>();
  world.elapsed += seconds;
  ExecResult result;
  result.outcome = "waited " + std::to_string(seconds) + " s";
  result.delta = {{"op", "wait"}, {"seconds", seconds}};
  return result;
}

}  // namespace

ExecResult execute_skill(const SkillCall& call, WorldState& world) {
  const std::vector<std::string> violations = validate_call(call, world);
  if (!violations.empty()) {
    std::string joined;
    for (const std::string& v : violations) {
      if (!joined.empty()) joined += "; ";
      joined += v;
    }
    raise(ErrorCode::precondition_failed,
          std::string(skill_name(call.skill)) + ": " + joined);
  }

  switch (call.skill) {
    case Skill::move: return exec_move(call, world);
    case Skill::find_obj: return exec_find_obj(call, world);
    case Skill::grasp: return exec_grasp(call, world);
    case Skill::place: return exec_place(call, world);
    case Skill::hand_over: return exec_hand_over(world);
    case Skill::find_person: return exec_find_person(call, world);
    case Skill::follow_person: return exec_follow_person(call, world);
    case Skill::speak: return exec_say(call.args["text"].get<std::string>(), world);
    case Skill::ask:
      return exec_say("ask: " + call.args["question"].get<std::string>(), world);
    case Skill::answer:
      return exec_say("answer: " + call.args["text"].get<std::string>(), world);
    case Skill::open_door: return exec_open_door(call, world);
    case Skill::wait: return exec_wait(call, world);
  }
  raise(ErrorCode::validation_error, "unhandled skill");
}

void apply_delta(WorldState& world, const json& delta) {
  if (delta.is_null()) return;
  const std::string op = delta.at("op").get<std::string>();
  if (op == "move") {
    const json& pose = delta.at("pose");
    world.robot.pose.position = {pose[0].get<double>(), pose[1].get<double>()};
    world.robot.pose.yaw = pose[2].get<double>();
    world.robot.room = delta.at("room").get<std::string>();
    if (delta.at("focus").is_null())
      world.focus_surface.reset();
    else
      world.focus_surface = delta.at("focus").get<std::string>();
  } else if (op == "find") {
    world.found_object = delta.at("found").get<std::string>();
  } else if (op == "grasp") {
    const std::string name = delta.at("object").get<std::string>();
    auto it = std::find_if(world.objects.begin(), world.objects.end(),
                           [&](const WorldObject& o) { return o.name == name; });
    if (it == world.objects.end())
      raise(ErrorCode::validation_error, "replay: grasp of missing object '" + name + "'");
    world.robot.held = *it;
    world.objects.erase(it);
    if (world.found_object && *world.found_object == name) world.found_object.reset();
  } else if (op == "place") {
    if (!world.robot.held)
      raise(ErrorCode::validation_error, "replay: place with empty hand");
    WorldObject object = *world.robot.held;
    const json& pose = delta.at("pose");
    object.pose = {pose[0].get<double>(), pose[1].get<double>(), pose[2].get<double>()};
    object.surface = delta.at("surface").get<std::string>();
    world.robot.held.reset();
    world.objects.push_back(std::move(object));
  } else if (op == "hand_over") {
    if (!world.robot.held)
      raise(ErrorCode::validation_error, "replay: hand_over with empty hand");
    world.robot.held.reset();
  } else if (op == "find_person") {
    world.robot.pose.yaw = delta.at("yaw").get<double>();
  } else if (op == "say") {
    world.said.push_back(delta.at("text").get<std::string>());
  } else if (op == "open_door") {
    world.open_doors.insert(delta.at("door").get<std::string>());
  } else if (op == "wait") {
    world.elapsed += delta.at("seconds").get<double>();
  } else {
    raise(ErrorCode::validation_error, "replay: unknown delta op '" + op + "'");
  }
}

WorldState replay(WorldState initial, const Transcript& transcript) {
  for (const StepRecord& step : transcript.steps) apply_delta(initial, step.delta);
  return initial;
}

Transcript plan_and_execute(const std::string& command, WorldState world,
                            const Backend& backend, int step_cap) {
  std::string trimmed = command;
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!trimmed.empty() && is_space(trimmed.front())) trimmed.erase(trimmed.begin());
  while (!trimmed.empty() && is_space(trimmed.back())) trimmed.pop_back();
  if (trimmed.empty())
    raise(ErrorCode::invalid_command, "command is empty");

  Transcript transcript;
  transcript.command = trimmed;

  BackendContext context;
  context.command = trimmed;
  context.world = &world;

  bool terminated = false;
  for (int step = 0; step < step_cap && !terminated; ++step) {
    BackendReply reply;
    try {
      reply = backend(context);
    } catch (const Error& e) {
      raise(e.code(), "backend at step " + std::to_string(step) + ": " + e.what());
    }
    if (reply.done) {
      transcript.status = Status::Done;
      terminated = true;
      break;
    }

    const std::vector<std::string> violations = validate_call(reply.call, world);
    if (!violations.empty()) {
      StepRecord record;
      record.call = reply.call;
      record.delta = nullptr;
      record.outcome = "rejected: " + violations.front();
      transcript.steps.push_back(std::move(record));
      transcript.status = Status::Failed;
      transcript.failure_reason = violations.front();
      terminated = true;
      break;
    }

    const ExecResult result = execute_skill(reply.call, world);
    StepRecord record;
    record.call = reply.call;
    record.delta = result.delta;
    record.outcome = result.outcome;
    transcript.steps.push_back(record);
    context.history.emplace_back(reply.call, result.outcome);

    if (!result.ok) {
      transcript.status = Status::Failed;
      transcript.failure_reason = result.outcome;
      terminated = true;
    }
  }
  if (!terminated) {
    transcript.status = Status::StepLimit;
    transcript.failure_reason =
        "no terminal state within " + std::to_string(step_cap) + " steps";
  }

  transcript.final_world = world_to_json(world);
  return transcript;
}

namespace {

std::vector<std::string> tokenize_command(const std::string& text) {
  const std::string lowered = lower(text) + " ";
  std::vector<std::string> words;
  std::string word;
  for (std::size_t i = 0; i < lowered.size(); ++i) {
    const char raw = lowered[i];
    const unsigned char c = static_cast<unsigned char>(raw);
    // Keep a dot only between digits so "2.5" survives but "kitchen." stays clean.
    const bool decimal_dot =
        raw == '.' && !word.empty() &&
        std::isdigit(static_cast<unsigned char>(word.back())) &&
        i + 1 < lowered.size() &&
        std::isdigit(static_cast<unsigned char>(lowered[i + 1]));
    if (std::isalnum(c) || raw == '_' || raw == '-' || decimal_dot) {
      word += raw;
    } else if (!word.empty()) {
      words.push_back(word);
      word.clear();
    }
  }
  if (!words.empty() && words.front() == "please") words.erase(words.begin());
  return words;
}

std::string join_span(const std::vector<std::string>& words, std::size_t from,
                      std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i == from && (words[i] == "the" || words[i] == "a" || words[i] == "an")) continue;
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

SkillCall make_call(Skill skill, json args) {
  SkillCall call;
  call.skill = skill;
  call.args = std::move(args);
  return call;
}

// "grasp the cup" can name its target directly; "grasp the right-most object"
// only makes sense as whatever find_obj just selected.
std::string grasp_target_for(const std::string& description) {
  const std::string text = lower(description);
  for (const char* q : {"right-most", "rightmost", "left-most", "leftmost", "closest",
                        "nearest"})
    if (text.find(q) != std::string::npos) return "found";
  return description;
}

std::optional<std::size_t> find_last(const std::vector<std::string>& words,
                                     std::initializer_list<const char*> needles,
                                     std::size_t from) {
  std::optional<std::size_t> at;
  for (std::size_t i = from; i < words.size(); ++i)
    for (const char* needle : needles)
      if (words[i] == needle) at = i;
  return at;
}

}  // namespace

std::vector<SkillCall> parse_command(const std::string& text) {
  const std::vector<std::string> words = tokenize_command(text);
  if (words.empty()) raise(ErrorCode::invalid_command, "command is empty");

  const std::string& head = words.front();
  std::vector<SkillCall> seq;

  auto span = [&](std::size_t from, std::size_t to) { return join_span(words, from, to); };

  if ((head == "go" || head == "navigate") && words.size() >= 3 && words[1] == "to") {
    const std::string location = span(2, words.size());
    if (!location.empty()) return {make_call(Skill::move, {{"location", location}})};
  }

  if (head == "bring" || head == "fetch" || head == "get") {
    std::size_t start = 1;
    if (start < words.size() && words[start] == "me") ++start;
    const auto sep = find_last(words, {"on", "from"}, start);
    if (sep && *sep > start && *sep + 1 < words.size()) {
      const std::string what = span(start, *sep);
      const std::string where = span(*sep + 1, words.size());
      if (!what.empty() && !where.empty())
        return {make_call(Skill::move, {{"location", where}}),
                make_call(Skill::find_obj, {{"description", what}}),
                make_call(Skill::grasp, {{"object", grasp_target_for(what)}}),
                make_call(Skill::move, {{"location", "operator"}}),
                make_call(Skill::hand_over, json::object())};
    }
  }

  if (head == "take" && words.size() >= 6) {
    std::size_t from_at = 0, to_at = 0;
    for (std::size_t i = 1; i < words.size(); ++i) {
      if (words[i] == "from" && from_at == 0) from_at = i;
      if (words[i] == "to") to_at = i;
    }
    if (from_at > 1 && to_at > from_at + 1 && to_at + 1 < words.size()) {
      const std::string what = span(1, from_at);
      const std::string source = span(from_at + 1, to_at);
      const std::string dest = span(to_at + 1, words.size());
      if (!what.empty() && !source.empty() && !dest.empty())
        return {make_call(Skill::move, {{"location", source}}),
                make_call(Skill::find_obj, {{"description", what}}),
                make_call(Skill::grasp, {{"object", grasp_target_for(what)}}),
                make_call(Skill::move, {{"location", dest}}),
                make_call(Skill::place, {{"surface", dest}})};
    }
  }

  if (head == "find" || (head == "look" && words.size() > 2 && words[1] == "for")) {
    const std::size_t start = head == "find" ? 1 : 2;
    const auto sep = find_last(words, {"in", "on"}, start);
    if (sep && *sep > start && *sep + 1 < words.size()) {
      const std::string what = span(start, *sep);
      const std::string where = span(*sep + 1, words.size());
      if (!what.empty() && !where.empty())
        return {make_call(Skill::move, {{"location", where}}),
                make_call(Skill::find_obj, {{"description", what}})};
    }
  }

  if (head == "greet" && words.size() >= 2) {
    const std::string who = span(1, words.size());
    if (!who.empty())
      return {make_call(Skill::find_person, {{"name", who}}),
              make_call(Skill::speak, {{"text", "hello, " + who}})};
  }

  if (head == "follow" && words.size() >= 2) {
    const std::string who = span(1, words.size());
    if (!who.empty())
      return {make_call(Skill::find_person, {{"name", who}}),
              make_call(Skill::follow_person, {{"name", who}})};
  }

  if (head == "open" && words.size() >= 2) {
    const std::string door = span(1, words.size());
    if (!door.empty()) return {make_call(Skill::open_door, {{"door", door}})};
  }

  if (head == "wait") {
    for (std::size_t i = 1; i < words.size(); ++i) {
      char* end = nullptr;
      const double seconds = std::strtod(words[i].c_str(), &end);
      if (end && *end == '\0' && end != words[i].c_str())
        return {make_call(Skill::wait, {{"seconds", seconds}})};
    }
  }

  if (head == "say" && words.size() >= 2)
    return {make_call(Skill::speak, {{"text", span(1, words.size())}})};

  if (head == "ask" && words.size() >= 2)
    return {make_call(Skill::ask, {{"question", span(1, words.size())}})};

  if (head == "answer")
    return {make_call(Skill::answer, {{"text", "the answer is forty-two"}})};

  raise(ErrorCode::unparsable_command,
        "cannot parse '" + text +
            "'; supported templates: go to L | bring/fetch X on/from Y | take X from Y"
            " to Z | find X in/on Y | greet P | follow P | open D | wait N seconds |"
            " say T | ask Q | answer the question");
}

Backend make_rule_backend(const std::string& command) {
  // Parse eagerly so unparsable commands fail before any step runs.
  auto sequence = std::make_shared<std::vector<SkillCall>>(parse_command(command));
  return [sequence](const BackendContext& context) {
    BackendReply reply;
    if (context.history.size() >= sequence->size()) {
      reply.done = true;
      return reply;
    }
    reply.call = (*sequence)[context.history.size()];
    return reply;
  };
}

std::string skill_catalog_text() {
  return
      "find_obj(description: string) - search the focused surface (or current room)\n"
      "grasp(object: string) - pick up an object; \"found\" targets the last find_obj hit\n"
      "move(location: string) - navigate to furniture, a room, a door, or a person\n"
      "place(surface: string) - put the held object on furniture\n"
      "hand_over() - give the held object to the nearest person\n"
      "find_person(name: string) - look for a person (\"operator\" allowed)\n"
      "follow_person(name: string) - walk to and follow a person\n"
      "speak(text: string) - say something\n"
      "ask(question: string) - ask a question\n"
      "answer(text: string) - answer the operator's question\n"
      "open_door(door: string) - open a door\n"
      "wait(seconds: number) - pause\n";
}

std::string observation_text(const WorldState& world) {
  std::ostringstream out;
  out << "rooms:";
  for (const semmap::Room& r : world.map.rooms) out << ' ' << r.name;
  out << "\nfurniture:";
  for (const semmap::Furniture& f : world.map.furniture)
    out << ' ' << f.name << "(in " << f.room << ")";
  out << "\ndoors:";
  for (const semmap::Door& d : world.map.doors)
    out << ' ' << d.name << "(" << d.room_a << "-" << d.room_b << ")";
  out << "\nobjects:";
  for (const WorldObject& o : world.objects)
    out << ' ' << o.name << "(" << o.cls << " on " << o.surface << ")";
  out << "\npersons:";
  for (const Person& p : world.persons) {
    out << ' ' << p.name;
    if (p.name == world.operator_name) out << "(operator)";
  }
  out << "\nrobot: room=" << (world.robot.room.empty() ? "?" : world.robot.room)
      << " held=" << (world.robot.held ? world.robot.held->name : "nothing");
  if (world.focus_surface) out << " focus=" << *world.focus_surface;
  if (world.found_object) out << " found=" << *world.found_object;
  return out.str();
}

}  // namespace homecore::plan
