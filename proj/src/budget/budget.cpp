// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0

#include "fieldpack/budget/budget.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

namespace fieldpack::budget {

void validate_topology(const RigTopology& t) {
  std::set<std::string> nodes;
  for (const auto& n : t.nodes) {
    if (!nodes.insert(n).second) throw TopologyError("duplicate node '" + n + "'");
  }
  std::map<std::string, const Link*> links;
  for (const auto& l : t.links) {
    if (!links.emplace(l.name, &l).second) throw TopologyError("duplicate link '" + l.name + "'");
    if (!nodes.contains(l.a) || !nodes.contains(l.b)) {
      throw TopologyError("link '" + l.name + "' joins an undeclared node");
    }
    if (!(l.capacity_mbps > 0.0) || !std::isfinite(l.capacity_mbps)) {
      throw TopologyError("link '" + l.name + "' needs a positive capacity");
    }
  }
  std::set<std::string> flow_names;
  for (const auto& f : t.flows) {
    if (!flow_names.insert(f.name).second) throw TopologyError("duplicate flow '" + f.name + "'");
    if (!nodes.contains(f.source) || !nodes.contains(f.sink)) {
      throw TopologyError("flow '" + f.name + "' has an undeclared endpoint");
    }
    if (!(f.rate_mbps >= 0.0) || !std::isfinite(f.rate_mbps)) {
      throw TopologyError("flow '" + f.name + "' needs a non-negative rate");
    }
    if (f.route.empty() && f.source != f.sink) {
      throw TopologyError("flow '" + f.name + "' has an empty route");
    }
    std::string at = f.source;
    for (const auto& hop : f.route) {
      auto it = links.find(hop);
      if (it == links.end()) {
        throw TopologyError("flow '" + f.name + "' is routed over undeclared link '" + hop + "'");
      }
      const Link& l = *it->second;
      if (l.a == at) {
        at = l.b;
      } else if (l.b == at) {
        at = l.a;
      } else {
        throw TopologyError("flow '" + f.name + "' route is broken at link '" + hop + "' (not attached to " +
                            at + ")");
      }
    }
    if (at != f.sink) {
      throw TopologyError("flow '" + f.name + "' route ends at " + at + ", not at " + f.sink);
    }
  }
}

std::vector<LinkReport> link_utilization(const RigTopology& t) {
  validate_topology(t);
  std::vector<LinkReport> out;
  std::map<std::string, std::size_t> at;
  for (const auto& l : t.links) {
    at[l.name] = out.size();
    out.push_back({l.name, l.a, l.b, l.capacity_mbps, 0.0, 0.0, false, 0.0, {}});
  }
  for (const auto& f : t.flows) {
    for (const auto& hop : f.route) {
      auto& r = out[at[hop]];
      r.total_mbps += f.rate_mbps;
      r.flows.push_back(f.name);
    }
  }
  for (auto& r : out) {
    r.utilization = r.total_mbps / r.capacity_mbps;
    r.violating = r.utilization > 1.0;
    r.excess_mbps = r.violating ? r.total_mbps - r.capacity_mbps : 0.0;
  }
  std::stable_sort(out.begin(), out.end(), [](const LinkReport& x, const LinkReport& y) {
    if (x.violating != y.violating) return x.violating;
    return x.violating && x.excess_mbps > y.excess_mbps;
  });
  return out;
}

double power_total(const std::vector<PowerComponent>& components) {
  double sum = 0.0;
  for (const auto& c : components) {
    if (!(c.watts >= 0.0) || !std::isfinite(c.watts)) {
      throw InputError("power component '" + c.name + "' has an invalid wattage");
    }
    sum += c.watts;
  }
  return sum;
}

double battery_runtime(double voltage_v, double capacity_ah, double load_w) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(voltage_v) || !positive(capacity_ah)) {
    throw InputError("battery voltage and capacity must be positive");
  }
  if (!positive(load_w)) throw InputError("load must be positive to compute a runtime");
  return voltage_v * capacity_ah / load_w;
}

bool BudgetReport::any_violation() const {
  return std::any_of(links.begin(), links.end(), [](const LinkReport& l) { return l.violating; });
}

BudgetReport analyze(const RigTopology& t) {
  BudgetReport r;
  r.links = link_utilization(t);
  r.components = t.power;
  r.power_w = power_total(t.power);
  for (const auto& b : t.batteries) {
    if (r.power_w > 0.0) {
      r.runtimes.push_back({b.name, b.voltage_v, b.capacity_ah,
                            battery_runtime(b.voltage_v, b.capacity_ah, r.power_w)});
    } else {
      battery_runtime(b.voltage_v, b.capacity_ah, 1.0);  // still validate the battery
    }
  }
  return r;
}

std::string format_table(const BudgetReport& r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-24s %12s %12s %8s  %s\n", "LINK", "ENDPOINTS", "LOAD Mb/s",
                "CAP Mb/s", "UTIL", "STATUS");
  out += line;
  for (const auto& l : r.links) {
    const std::string ends = l.a + "-" + l.b;
    std::snprintf(line, sizeof line, "%-16s %-24s %12.3f %12.3f %7.1f%%  %s\n", l.name.c_str(), ends.c_str(),
                  l.total_mbps, l.capacity_mbps, l.utilization * 100.0,
                  l.violating ? "OVERSUBSCRIBED" : "ok");
    out += line;
  }
  out += "\nPOWER\n";
  for (const auto& c : r.components) {
    std::snprintf(line, sizeof line, "  %-20s %8.2f W\n", c.name.c_str(), c.watts);
    out += line;
  }
  std::snprintf(line, sizeof line, "  %-20s %8.2f W\n", "total", r.power_w);
  out += line;
  if (!r.runtimes.empty()) out += "\nBATTERY RUNTIME\n";
  for (const auto& b : r.runtimes) {
    std::snprintf(line, sizeof line, "  %-20s %5.1f V %5.2f Ah  %6.2f h\n", b.battery.c_str(), b.voltage_v,
                  b.capacity_ah, b.hours);
    out += line;
  }
  out += r.any_violation() ? "\nRESULT: link oversubscribed\n" : "\nRESULT: ok\n";
  return out;
}

std::string format_json(const BudgetReport& r) {
  nlohmann::json j;
  j["links"] = nlohmann::json::array();
  for (const auto& l : r.links) {
    j["links"].push_back({{"name", l.name},
                          {"a", l.a},
                          {"b", l.b},
                          {"capacity_mbps", l.capacity_mbps},
                          {"total_mbps", l.total_mbps},
                          {"utilization", l.utilization},
                          {"violating", l.violating},
                          {"excess_mbps", l.excess_mbps},
                          {"flows", l.flows}});
  }
  j["power"]["total_w"] = r.power_w;
  j["power"]["components"] = nlohmann::json::array();
  for (const auto& c : r.components) j["power"]["components"].push_back({{"name", c.name}, {"watts", c.watts}});
  j["batteries"] = nlohmann::json::array();
  for (const auto& b : r.runtimes) {
    j["batteries"].push_back(
        {{"name", b.battery}, {"voltage_v", b.voltage_v}, {"capacity_ah", b.capacity_ah}, {"runtime_h", b.hours}});
  }
  j["violation"] = r.any_violation();
  return j.dump(2);
}

}  // namespace fieldpack::budget
