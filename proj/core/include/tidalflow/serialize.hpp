#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tidalflow/dao.hpp"
#include "tidalflow/network.hpp"

namespace tidalflow {

nlohmann::json plan_to_json(const ControlPlan& plan);
ControlPlan plan_from_json(const nlohmann::json& j);
void save_plan(const ControlPlan& plan, const std::string& path);
ControlPlan load_plan(const std::string& path);

nlohmann::json ledger_entry_to_json(const LedgerEntry& entry);
LedgerEntry ledger_entry_from_json(const nlohmann::json& j);

/// Line-delimited JSON, one entry per line.
void write_ledger(const std::vector<LedgerEntry>& ledger,
                  const std::string& path);
std::vector<LedgerEntry> read_ledger(const std::string& path);

}  // namespace tidalflow
