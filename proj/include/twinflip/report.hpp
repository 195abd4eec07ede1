#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "json.hpp"

namespace twinflip {

inline constexpr int kReportSchemaVersion = 1;

/// One verified property: name, outcome, how many instances were examined and
/// the first counterexample found.
struct CheckItem {
  std::string name;
  bool pass = true;
  std::uint64_t checked = 0;
  std::string witness;

  void fail(std::string w) {
    if (pass) witness = std::move(w);
    pass = false;
  }
};

struct CheckReport {
  std::deque<CheckItem> items;  // deque keeps references from add() valid

  CheckItem& add(std::string name) {
    items.push_back({std::move(name), true, 0, {}});
    return items.back();
  }
  bool ok() const {
    for (const auto& i : items)
      if (!i.pass) return false;
    return true;
  }
  const CheckItem* find(const std::string& name) const {
    for (const auto& i : items)
      if (i.name == name) return &i;
    return nullptr;
  }
  bool passed(const std::string& name) const {
    const auto* i = find(name);
    return i != nullptr && i->pass;
  }
  void merge(const CheckReport& o, const std::string& prefix = {}) {
    for (auto i : o.items) {
      i.name = prefix + i.name;
      items.push_back(std::move(i));
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& i : items)
      arr.push_back({{"name", i.name}, {"pass", i.pass}, {"checked", i.checked}, {"witness", i.witness}});
    return arr;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& i : items) {
      out += (i.pass ? "PASS " : "FAIL ") + i.name + " (" + std::to_string(i.checked) + " checked)";
      if (!i.pass) out += ": " + i.witness;
      out += '\n';
    }
    return out;
  }
};

}  // namespace twinflip
