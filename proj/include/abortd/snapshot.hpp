#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace abortd::world {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObjectRecord {
  std::string name;
  std::set<std::string> characteristics;
  std::string location;  // empty = none (held or scenery)
  std::optional<bool> opened;
  std::optional<bool> powered_on;
  bool immobile = false;

  bool has(const std::string& flag) const {
    return characteristics.count(flag) > 0;
  }
};

struct WorldSnapshot {
  std::vector<ObjectRecord> objects;
  std::string left_hand;   // empty = nothing held
  std::string right_hand;
};

// Known characteristic vocabulary; anything else is preserved but ignored
// with a warning downstream.
inline const std::set<std::string>& known_characteristics() {
  static const std::set<std::string> flags = {
      "canCut",   "canBake", "canContain",     "canOpen",
      "canTurnOn", "isFridge", "isTrash",      "isMeal",
      "edible",   "perishableHint", "portable",
  };
  return flags;
}

// Schema: {"version":1, "robot":{"leftHand":str|null,"rightHand":str|null},
//          "objects":[{"name":str, "characteristics":[str], "location":str|null,
//                      "opened":bool?, "poweredOn":bool?, "immobile":bool}]}
inline WorldSnapshot parse_snapshot(const nlohmann::json& j) {
  if (!j.is_object()) throw SnapshotError("snapshot must be a JSON object");
  if (!j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != 1)
    throw SnapshotError("snapshot requires \"version\": 1");
  if (!j.contains("robot") || !j["robot"].is_object())
    throw SnapshotError("snapshot requires a \"robot\" object");
  if (!j.contains("objects") || !j["objects"].is_array())
    throw SnapshotError("snapshot requires an \"objects\" array");

  WorldSnapshot snap;
  const auto& robot = j["robot"];
  auto hand = [&](const char* key) -> std::string {
    if (!robot.contains(key) || robot[key].is_null()) return "";
    if (!robot[key].is_string())
      throw SnapshotError(std::string("robot.") + key + " must be a string or null");
    return robot[key].get<std::string>();
  };
  snap.left_hand = hand("leftHand");
  snap.right_hand = hand("rightHand");

  for (const auto& o : j["objects"]) {
    if (!o.is_object() || !o.contains("name") || !o["name"].is_string())
      throw SnapshotError("every object needs a string \"name\"");
    ObjectRecord rec;
    rec.name = o["name"].get<std::string>();
    if (o.contains("characteristics")) {
      if (!o["characteristics"].is_array())
        throw SnapshotError("characteristics of '" + rec.name +
                            "' must be an array");
      for (const auto& c : o["characteristics"])
        rec.characteristics.insert(c.get<std::string>());
    }
    if (o.contains("location") && !o["location"].is_null())
      rec.location = o["location"].get<std::string>();
    if (o.contains("opened") && !o["opened"].is_null())
      rec.opened = o["opened"].get<bool>();
    if (o.contains("poweredOn") && !o["poweredOn"].is_null())
      rec.powered_on = o["poweredOn"].get<bool>();
    if (o.contains("immobile")) rec.immobile = o["immobile"].get<bool>();
    snap.objects.push_back(std::move(rec));
  }
  return snap;
}

inline WorldSnapshot parse_snapshot_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("invalid snapshot JSON: ") + e.what());
  }
  return parse_snapshot(j);
}

}  // namespace abortd::world
