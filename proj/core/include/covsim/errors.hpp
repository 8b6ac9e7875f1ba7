#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace covsim {

/// Base class for all library errors.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

class DuplicateSitesError : public SimError {
public:
    DuplicateSitesError(int first, int second)
        : SimError("sites " + std::to_string(first) + " and " + std::to_string(second) +
                   " coincide within 1e-9 m"),
          first_site(first),
          second_site(second) {}
    int first_site;
    int second_site;
};

class SiteOutsideWorkspaceError : public SimError {
public:
    explicit SiteOutsideWorkspaceError(int site)
        : SimError("site " + std::to_string(site) + " lies outside the workspace"), site_index(site) {}
    int site_index;
};

class EmptyCellError : public SimError {
public:
    EmptyCellError() : SimError("cell polygon is empty") {}
};

class CoincidentAgentsError : public SimError {
public:
    CoincidentAgentsError(int first, int second)
        : SimError("agents " + std::to_string(first) + " and " + std::to_string(second) +
                   " coincide; barrier gradient vanishes"),
          first_agent(first),
          second_agent(second) {}
    int first_agent;
    int second_agent;
};

class InfeasibleError : public SimError {
public:
    explicit InfeasibleError(std::vector<int> rows)
        : SimError("safety program infeasible"), violated_rows(std::move(rows)) {}
    std::vector<int> violated_rows;
};

class MaxIterationsError : public SimError {
public:
    explicit MaxIterationsError(int iters)
        : SimError("active-set solver exceeded " + std::to_string(iters) + " iterations"),
          iterations(iters) {}
    int iterations;
};

class ParseError : public SimError {
public:
    ParseError(int line_number, const std::string& key_name, const std::string& reason)
        : SimError("parse error at line " + std::to_string(line_number) + " (" + key_name +
                   "): " + reason),
          line(line_number),
          key(key_name) {}
    int line;
    std::string key;
};

class ValidationError : public SimError {
public:
    ValidationError(const std::string& key_name, const std::string& why)
        : SimError("invalid value for '" + key_name + "': " + why), key(key_name), reason(why) {}
    std::string key;
    std::string reason;
};

class IoError : public SimError {
public:
    explicit IoError(const std::string& path, const std::string& reason)
        : SimError("io error on '" + path + "': " + reason) {}
};

/// Wraps an error raised while advancing the simulation; carries the step index.
class StepError : public SimError {
public:
    StepError(int step, const std::string& cause)
        : SimError("step " + std::to_string(step) + ": " + cause), step_index(step) {}
    int step_index;
};

}  // namespace covsim
