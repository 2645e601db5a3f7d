#include "latrg/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace latrg {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::ordered_json Report::to_json() const {
    nlohmann::ordered_json j;
    j["versions"] = {{"latrg", kVersion}};
    j["config_hash"] = config_hash;
    j["config"] = config_echo;
    j["all_pass"] = all_pass;
    auto tasks_json = nlohmann::ordered_json::array();
    for (const auto& t : tasks) {
        nlohmann::ordered_json tj;
        tj["task"] = t.task;
        auto verdicts = nlohmann::ordered_json::array();
        for (const auto& v : t.verdicts) {
            verdicts.push_back({{"name", v.name},
                                {"pass", v.pass},
                                {"value", v.value},
                                {"detail", v.detail}});
        }
        tj["verdicts"] = verdicts;
        tj["table"] = {{"columns", t.table.columns}, {"rows", t.table.rows}};
        tasks_json.push_back(tj);
    }
    j["tasks"] = tasks_json;
    return j;
}

std::vector<std::string> emit_report(const Report& report, const std::string& dir,
                                     bool write_json, bool write_csv) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;

    if (write_json) {
        const fs::path p = fs::path(dir) / "report.json";
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << report.to_json().dump(2) << "\n";
        written.push_back(p.string());
    }
    if (write_csv) {
        for (const auto& t : report.tasks) {
            if (t.table.columns.empty()) continue;
            std::string name = t.task;
            for (auto& ch : name)
                if (ch == '-') ch = '_';
            const fs::path p = fs::path(dir) / (name + ".csv");
            std::ofstream out(p, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + p.string());
            for (std::size_t i = 0; i < t.table.columns.size(); ++i)
                out << (i ? "," : "") << t.table.columns[i];
            out << "\n";
            for (const auto& row : t.table.rows) {
                for (std::size_t i = 0; i < row.size(); ++i) {
                    if (i) out << ",";
                    if (row[i].is_number_float())
                        out << format_double(row[i].get<double>());
                    else if (row[i].is_string())
                        out << row[i].get<std::string>();
                    else
                        out << row[i].dump();
                }
                out << "\n";
            }
            written.push_back(p.string());
        }
    }
    return written;
}

}  // namespace latrg
