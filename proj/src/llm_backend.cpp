#include <chrono>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "homecore/error.hpp"
#include "homecore/planner.hpp"

namespace homecore::plan {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string host;
  int port = 80;
  std::string path = "/";
};

Endpoint parse_endpoint(const std::string& url) {
  const std::string http = "http://";
  if (url.rfind("https://", 0) == 0)
    raise(ErrorCode::invalid_config, "https endpoints are not supported; use http://");
  if (url.rfind(http, 0) != 0)
    raise(ErrorCode::invalid_config, "endpoint must start with http://: " + url);

  Endpoint ep;
  std::string rest = url.substr(http.size());
  const std::size_t slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) ep.path = rest.substr(slash);
  const std::size_t colon = authority.find(':');
  if (colon != std::string::npos) {
    ep.host = authority.substr(0, colon);
    try {
      ep.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      raise(ErrorCode::invalid_config, "bad port in endpoint: " + url);
    }
  } else {
    ep.host = authority;
  }
  if (ep.host.empty()) raise(ErrorCode::invalid_config, "endpoint has no host: " + url);
  return ep;
}

std::string system_prompt() {
  return
      "You are the task planner of a domestic service robot. Decide the single next "
      "skill to run, one step at a time.\n\nAvailable skills:\n" +
      skill_catalog_text() +
      "\nReply with exactly one JSON object and nothing else: either "
      "{\"skill\": \"<name>\", \"args\": {...}} to run a skill, or {\"done\": true} "
      "when the command is complete.";
}

std::string user_prompt(const BackendContext& context) {
  std::ostringstream out;
  out << "Command: " << context.command << "\n\nWorld:\n"
      << observation_text(*context.world) << "\n";
  if (!context.history.empty()) {
    out << "\nSteps so far:\n";
    for (std::size_t i = 0; i < context.history.size(); ++i) {
      const auto& [call, outcome] = context.history[i];
      out << (i + 1) << ". " << skill_name(call.skill) << ' ' << call.args.dump()
          << " -> " << outcome << '\n';
    }
  }
  out << "\nWhat is the next step?";
  return out.str();
}

// Pulls the first JSON object out of a reply that may wrap it in prose or a
// chat-completion envelope. Returns null if none parses.
json extract_action(const std::string& text) {
  json direct = json::parse(text, nullptr, false);
  if (direct.is_object()) {
    if (direct.contains("skill") || direct.contains("done")) return direct;
    if (direct.contains("choices") && direct["choices"].is_array() &&
        !direct["choices"].empty()) {
      const json& first = direct["choices"][0];
      if (first.contains("message") && first["message"].contains("content") &&
          first["message"]["content"].is_string())
        return extract_action(first["message"]["content"].get<std::string>());
    }
    if (direct.contains("content") && direct["content"].is_string())
      return extract_action(direct["content"].get<std::string>());
  }

  for (std::size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          json candidate = json::parse(text.substr(start, i - start + 1), nullptr, false);
          if (candidate.is_object() &&
              (candidate.contains("skill") || candidate.contains("done")))
            return candidate;
          break;
        }
      }
    }
  }
  return json(nullptr);
}

// Empty string means the action is acceptable.
std::string check_action(const json& action, BackendReply* reply) {
  if (action.is_null()) return "the reply contains no JSON action object";
  if (action.contains("done")) {
    if (!action["done"].is_boolean() || !action["done"].get<bool>())
      return "\"done\" must be the boolean true";
    reply->done = true;
    return "";
  }
  if (!action["skill"].is_string()) return "\"skill\" must be a string";
  const std::string name = action["skill"].get<std::string>();
  const std::optional<Skill> skill = skill_from_name(name);
  if (!skill) return "\"" + name + "\" is not one of the 12 skills";
  json args = action.value("args", json::object());
  if (!args.is_object()) return "\"args\" must be a JSON object";
  reply->done = false;
  reply->call.skill = *skill;
  reply->call.args = std::move(args);
  return "";
}

}  // namespace

Backend make_llm_backend(const LlmConfig& config) {
  const Endpoint ep = parse_endpoint(config.endpoint);
  const std::string api_key = config.api_key;
  const double timeout_s = config.timeout_s;
  const int max_retries = config.max_retries;

  return [ep, api_key, timeout_s, max_retries](const BackendContext& context) {
    httplib::Client client(ep.host, ep.port);
    const auto timeout = std::chrono::microseconds(
        static_cast<long long>(timeout_s * 1e6));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    json messages = json::array();
    messages.push_back({{"role", "user"}, {"content", user_prompt(context)}});

    std::string last_problem;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
      const json body = {{"system", system_prompt()}, {"messages", messages}};
      httplib::Result res =
          client.Post(ep.path, headers, body.dump(), "application/json");

      if (!res) {
        const httplib::Error err = res.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write)
          raise(ErrorCode::timeout,
                "no reply from " + ep.host + ":" + std::to_string(ep.port) + " within " +
                    std::to_string(timeout_s) + " s");
        raise(ErrorCode::http_error,
              "request to " + ep.host + ":" + std::to_string(ep.port) +
                  " failed: " + httplib::to_string(err));
      }
      if (res->status != 200)
        raise(ErrorCode::http_error,
              "endpoint returned status " + std::to_string(res->status));

      BackendReply reply;
      const json action = extract_action(res->body);
      last_problem = check_action(action, &reply);
      if (last_problem.empty()) return reply;

      messages.push_back({{"role", "assistant"}, {"content", res->body}});
      messages.push_back(
          {{"role", "user"},
           {"content", "That reply was invalid: " + last_problem +
                           ". Reply with exactly one JSON object: {\"skill\": \"<name>\","
                           " \"args\": {...}} or {\"done\": true}."}});
    }
    raise(ErrorCode::schema_violation,
          "no valid action after " + std::to_string(max_retries) +
              " retries; last problem: " + last_problem);
  };
}

}  // namespace homecore::plan
