// Copyright 2026 fieldpack contributors
// SPDX-License-Identifier: Apache-2.0
//
// budget.hpp -- static bandwidth and power analysis over a declared rig.
//
// Routing is static: each flow names the ordered list of links it crosses.
// Power is a lossless sum; runtime is battery energy over load.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fieldpack::budget {

struct Link {
  std::string name;
  std::string a;
  std::string b;
  double capacity_mbps = 0.0;
};

struct Flow {
  std::string name;
  std::string source;
  std::string sink;
  double rate_mbps = 0.0;
  std::vector<std::string> route;  // link names, source to sink
};

struct PowerComponent {
  std::string name;
  double watts = 0.0;
};

struct Battery {
  std::string name;
  double voltage_v = 0.0;
  double capacity_ah = 0.0;
};

struct RigTopology {
  std::vector<std::string> nodes;
  std::vector<Link> links;
  std::vector<Flow> flows;
  std::vector<PowerComponent> power;
  std::vector<Battery> batteries;
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws TopologyError: unknown node, non-positive capacity, duplicate link,
// flow over an undeclared link, or a route that is not a connected path from
// source to sink.
void validate_topology(const RigTopology& topology);

struct LinkReport {
  std::string name;
  std::string a;
  std::string b;
  double capacity_mbps = 0.0;
  double total_mbps = 0.0;
  double utilization = 0.0;
  bool violating = false;
  double excess_mbps = 0.0;
  std::vector<std::string> flows;
};

// Violating links first, largest excess first; then the rest in declaration
// order. Validates the topology first.
std::vector<LinkReport> link_utilization(const RigTopology& topology);

// Throws InputError on a negative or non-finite wattage.
double power_total(const std::vector<PowerComponent>& components);

// hours = voltage * capacity / load. Throws InputError unless all positive.
double battery_runtime(double voltage_v, double capacity_ah, double load_w);

struct RuntimeReport {
  std::string battery;
  double voltage_v = 0.0;
  double capacity_ah = 0.0;
  double hours = 0.0;
};

struct BudgetReport {
  std::vector<LinkReport> links;
  double power_w = 0.0;
  std::vector<PowerComponent> components;
  std::vector<RuntimeReport> runtimes;  // empty when the load is zero
  bool any_violation() const;
};

BudgetReport analyze(const RigTopology& topology);

std::string format_table(const BudgetReport& report);
std::string format_json(const BudgetReport& report);

}  // namespace fieldpack::budget
