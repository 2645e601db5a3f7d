#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace latrg {

inline constexpr const char* kVersion = "0.1.0";

struct TaskVerdict {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct TaskTable {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::ordered_json>> rows;  // number or string cells
};

struct TaskResult {
    std::string task;
    std::vector<TaskVerdict> verdicts;
    TaskTable table;
};

struct Report {
    std::string config_hash;
    nlohmann::ordered_json config_echo;
    std::vector<TaskResult> tasks;
    bool all_pass = true;

    nlohmann::ordered_json to_json() const;
};

// 17 significant digits: doubles round-trip to the same binary value.
std::string format_double(double v);

// report.json plus one CSV per task; returns the written paths.
std::vector<std::string> emit_report(const Report& report, const std::string& dir,
                                     bool write_json, bool write_csv);

}  // namespace latrg
