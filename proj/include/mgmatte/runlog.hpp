#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgmatte/system.hpp"
#include "mgmatte/trace.hpp"

namespace mgmatte {

// Line-delimited JSON run log: one "meta" record, one record per iteration,
// one "final" record. Self-describing enough to re-run the experiment;
// residuals are printed with shortest round-trip decimals by the JSON
// serializer, so the file reproduces the in-memory trace exactly.
class RunLogWriter {
public:
    explicit RunLogWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("RunLogWriter: cannot open " + path);
    }

    void write_meta(const nlohmann::json& meta) {
        nlohmann::json j = meta;
        j["record"] = "meta";
        out_ << j.dump() << "\n";
    }

    void write_trace(const ConvergenceTrace& trace) {
        for (std::size_t i = 0; i < trace.residuals.size(); ++i) {
            nlohmann::json j;
            j["record"] = "iteration";
            j["iteration"] = i;
            j["residual"] = trace.residuals[i];
            j["work"] = trace.work_units[i];
            out_ << j.dump() << "\n";
        }
    }

    void write_final(const SolveReport& report, double seconds = -1.0) {
        nlohmann::json j;
        j["record"] = "final";
        j["iterations"] = report.iterations;
        j["terminated"] = to_string(report.terminated);
        if (seconds >= 0.0) j["seconds"] = seconds;
        out_ << j.dump() << "\n";
    }

private:
    std::ofstream out_;
};

struct RunLog {
    nlohmann::json meta;
    std::vector<double> residuals;
    std::vector<std::uint64_t> work_units;
    nlohmann::json final;
};

inline RunLog read_run_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_run_log: cannot open " + path);
    RunLog log;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        const std::string kind = j.value("record", "");
        if (kind == "meta") log.meta = j;
        else if (kind == "iteration") {
            log.residuals.push_back(j.at("residual").get<double>());
            log.work_units.push_back(j.at("work").get<std::uint64_t>());
        } else if (kind == "final") log.final = j;
    }
    return log;
}

}  // namespace mgmatte
