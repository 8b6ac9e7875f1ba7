#include "covsim/scenario_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

struct Entry {
    std::string section;
    int occurrence = 0;  // for repeated sections
    std::string key;
    std::string value;
    int line = 0;
    bool consumed = false;
};

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

const char* const kSections[] = {"workspace", "targets", "agents", "density",
                                 "gains",     "numerics", "stop"};

struct Document {
    std::vector<Entry> entries;
    std::vector<std::pair<std::string, int>> sections;  // name, line (in order)

    int count(std::string_view section) const {
        int c = 0;
        for (const auto& [name, line] : sections)
            if (name == section) ++c;
        return c;
    }
};

Document tokenize(std::string_view text) {
    Document doc;
    std::string current_section;
    int current_occurrence = -1;
    std::vector<int> seen_count(std::size(kSections), 0);

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, line, "unterminated section header");
            const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            const auto* it = std::find(std::begin(kSections), std::end(kSections), name);
            if (it == std::end(kSections)) {
                throw ParseError(line_no, name, "unknown section");
            }
            const auto idx = static_cast<std::size_t>(it - std::begin(kSections));
            if (name != "targets" && seen_count[idx] > 0) {
                throw ParseError(line_no, name, "section repeated");
            }
            current_section = name;
            current_occurrence = seen_count[idx]++;
            doc.sections.emplace_back(name, line_no);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, line, "expected 'key = value'");
        }
        Entry e;
        e.section = current_section;
        e.occurrence = current_occurrence;
        e.key = trim(std::string_view(line).substr(0, eq));
        e.value = trim(std::string_view(line).substr(eq + 1));
        e.line = line_no;
        if (current_section.empty()) {
            throw ParseError(line_no, e.key, "key outside any section");
        }
        if (e.key.empty()) throw ParseError(line_no, line, "empty key");
        doc.entries.push_back(std::move(e));
    }
    return doc;
}

class Reader {
public:
    explicit Reader(Document& doc) : doc_(doc) {}

    Entry* find(std::string_view section, int occurrence, std::string_view key) {
        for (Entry& e : doc_.entries) {
            if (e.section == section && e.occurrence == occurrence && e.key == key) {
                e.consumed = true;
                return &e;
            }
        }
        return nullptr;
    }

    std::optional<std::string> text(std::string_view section, int occ, std::string_view key) {
        Entry* e = find(section, occ, key);
        if (!e) return std::nullopt;
        return e->value;
    }

    std::optional<double> number(std::string_view section, int occ, std::string_view key) {
        Entry* e = find(section, occ, key);
        if (!e) return std::nullopt;
        return parse_number(*e, e->value);
    }

    std::optional<long> integer(std::string_view section, int occ, std::string_view key) {
        Entry* e = find(section, occ, key);
        if (!e) return std::nullopt;
        char* end = nullptr;
        const long v = std::strtol(e->value.c_str(), &end, 10);
        if (end == e->value.c_str() || *end != '\0') {
            throw ParseError(e->line, e->key, "not an integer: '" + e->value + "'");
        }
        return v;
    }

    std::optional<bool> boolean(std::string_view section, int occ, std::string_view key) {
        Entry* e = find(section, occ, key);
        if (!e) return std::nullopt;
        if (e->value == "true") return true;
        if (e->value == "false") return false;
        throw ParseError(e->line, e->key, "expected true or false");
    }

    // Scalar or comma-separated list of numbers.
    std::optional<std::vector<double>> number_list(std::string_view section, int occ,
                                                   std::string_view key) {
        Entry* e = find(section, occ, key);
        if (!e) return std::nullopt;
        std::vector<double> out;
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(parse_number(*e, trim(item)));
        }
        if (out.empty()) throw ParseError(e->line, e->key, "empty list");
        return out;
    }

    void reject_unconsumed() const {
        for (const Entry& e : doc_.entries) {
            if (!e.consumed) throw ParseError(e.line, e.key, "unknown key");
        }
    }

private:
    static double parse_number(const Entry& e, const std::string& token) {
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') {
            throw ParseError(e.line, e.key, "not a number: '" + token + "'");
        }
        return v;
    }

    Document& doc_;
};

double require_number(Reader& r, std::string_view section, int occ, const char* key) {
    auto v = r.number(section, occ, key);
    if (!v) {
        throw ValidationError(std::string(key),
                              "missing from [" + std::string(section) + "] section");
    }
    return *v;
}

void require_positive(const char* key, double v) {
    if (!(v > 0.0)) throw ValidationError(key, "must be positive");
}

void check_agent_list(const char* key, const std::vector<double>& values, int agents) {
    if (values.size() != 1 && values.size() != static_cast<std::size_t>(agents)) {
        throw ValidationError(key, "needs 1 value or one per agent");
    }
    for (double v : values) require_positive(key, v);
}

std::vector<Point> parse_point_list(const std::string& text, int line) {
    std::vector<Point> pts;
    std::stringstream ss(text);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        const std::string p = trim(pair);
        if (p.empty()) continue;
        const std::size_t comma = p.find(',');
        if (comma == std::string::npos) {
            throw ParseError(line, "points", "expected 'x,y' pairs separated by ';'");
        }
        char* end = nullptr;
        const std::string xs = trim(p.substr(0, comma));
        const std::string ys = trim(p.substr(comma + 1));
        const double x = std::strtod(xs.c_str(), &end);
        if (end == xs.c_str() || *end != '\0') throw ParseError(line, "points", "bad x: " + xs);
        const double y = std::strtod(ys.c_str(), &end);
        if (end == ys.c_str() || *end != '\0') throw ParseError(line, "points", "bad y: " + ys);
        pts.push_back({x, y});
    }
    return pts;
}

}  // namespace

ScenarioConfig parse_scenario_text(std::string_view text, std::string_view name) {
    Document doc = tokenize(text);
    Reader r(doc);
    ScenarioConfig cfg;

    if (doc.count("workspace") == 0) {
        throw ValidationError("workspace", "section missing in " + std::string(name));
    }
    cfg.workspace.min_corner = {require_number(r, "workspace", 0, "min_x"),
                                require_number(r, "workspace", 0, "min_y")};
    cfg.workspace.max_corner = {require_number(r, "workspace", 0, "max_x"),
                                require_number(r, "workspace", 0, "max_y")};
    if (!(cfg.workspace.min_corner.x < cfg.workspace.max_corner.x) ||
        !(cfg.workspace.min_corner.y < cfg.workspace.max_corner.y)) {
        throw ValidationError("workspace", "must have positive extent");
    }

    const int target_count = doc.count("targets");
    for (int t = 0; t < target_count; ++t) {
        TargetRegion region;
        region.id = t;
        region.min_corner = {require_number(r, "targets", t, "min_x"),
                             require_number(r, "targets", t, "min_y")};
        region.max_corner = {require_number(r, "targets", t, "max_x"),
                             require_number(r, "targets", t, "max_y")};
        if (!(region.min_corner.x < region.max_corner.x) ||
            !(region.min_corner.y < region.max_corner.y)) {
            throw ValidationError("targets", "target " + std::to_string(t) +
                                                 " must have positive extent");
        }
        if (!cfg.workspace.contains(region.min_corner) ||
            !cfg.workspace.contains(region.max_corner)) {
            throw ValidationError("targets", "target " + std::to_string(t) +
                                                 " extends outside the workspace");
        }
        cfg.targets.push_back(region);
    }

    if (doc.count("agents") == 0) throw ValidationError("agents", "section missing");
    {
        auto count = r.integer("agents", 0, "count");
        if (!count) throw ValidationError("count", "missing from [agents] section");
        if (*count < 1) throw ValidationError("count", "must be at least 1");
        cfg.agent_count = static_cast<int>(*count);

        auto kind = r.text("agents", 0, "formation");
        if (!kind) throw ValidationError("formation", "missing from [agents] section");
        if (*kind == "grid") {
            cfg.formation.kind = Formation::Kind::grid;
        } else if (*kind == "triangle") {
            cfg.formation.kind = Formation::Kind::triangle;
        } else if (*kind == "explicit") {
            cfg.formation.kind = Formation::Kind::explicit_points;
        } else {
            throw ValidationError("formation", "must be grid, triangle, or explicit");
        }

        if (cfg.formation.kind == Formation::Kind::explicit_points) {
            Entry* e = r.find("agents", 0, "points");
            if (!e) throw ValidationError("points", "missing for explicit formation");
            cfg.formation.points = parse_point_list(e->value, e->line);
        } else {
            auto rows = r.integer("agents", 0, "rows");
            if (!rows) throw ValidationError("rows", "missing from [agents] section");
            if (*rows < 1) throw ValidationError("rows", "must be at least 1");
            cfg.formation.rows = static_cast<int>(*rows);
            if (cfg.formation.kind == Formation::Kind::grid) {
                auto cols = r.integer("agents", 0, "cols");
                if (!cols) throw ValidationError("cols", "missing from [agents] section");
                if (*cols < 1) throw ValidationError("cols", "must be at least 1");
                cfg.formation.cols = static_cast<int>(*cols);
            }
            const double spacing = require_number(r, "agents", 0, "spacing");
            if (!(spacing > 0.0)) throw ValidationError("spacing", "must be positive");
            cfg.formation.spacing = spacing;
            cfg.formation.origin = {require_number(r, "agents", 0, "origin_x"),
                                    require_number(r, "agents", 0, "origin_y")};
        }

        if (auto radius = r.number("agents", 0, "sensor_radius")) {
            require_positive("sensor_radius", *radius);
            cfg.sensor.radius = *radius;
        }
    }

    if (auto v = r.number("density", 0, "baseline")) {
        require_positive("baseline", *v);
        cfg.density.baseline = *v;
    }
    if (auto v = r.number_list("density", 0, "weight")) {
        check_agent_list("weight", *v, cfg.agent_count);
        cfg.density.weights = *v;
    }
    if (auto v = r.number_list("density", 0, "sigma_x")) {
        check_agent_list("sigma_x", *v, cfg.agent_count);
        cfg.density.sigma_x = *v;
    }
    if (auto v = r.number_list("density", 0, "sigma_y")) {
        check_agent_list("sigma_y", *v, cfg.agent_count);
        cfg.density.sigma_y = *v;
    }
    if (auto v = r.text("density", 0, "mask_mode")) {
        if (*v == "off") {
            cfg.density.mask_mode = MaskMode::off;
        } else if (*v == "detected-region-boost") {
            cfg.density.mask_mode = MaskMode::detected_region_boost;
        } else {
            throw ValidationError("mask_mode", "must be off or detected-region-boost");
        }
    }
    if (auto v = r.number("density", 0, "region_bonus")) {
        require_positive("region_bonus", *v);
        cfg.density.region_bonus = *v;
    }
    if (auto v = r.boolean("density", 0, "latch_detection")) cfg.latch_detection = *v;

    if (doc.count("gains") == 0) throw ValidationError("gains", "section missing");
    {
        const double d_min = require_number(r, "gains", 0, "d_min");
        require_positive("d_min", d_min);
        cfg.d_min = d_min;
        if (auto v = r.number("gains", 0, "k")) {
            require_positive("k", *v);
            cfg.gain_k = *v;
        }
        if (auto v = r.number("gains", 0, "gamma")) {
            require_positive("gamma", *v);
            cfg.gamma = *v;
        }
        if (auto v = r.number("gains", 0, "u_max")) {
            if (*v < 0.0) throw ValidationError("u_max", "must be non-negative (0 disables)");
            cfg.u_max = *v;
        }
    }

    if (auto v = r.number("numerics", 0, "dt")) {
        require_positive("dt", *v);
        cfg.dt = *v;
    }
    if (auto v = r.integer("numerics", 0, "resolution")) {
        if (*v < 16) throw ValidationError("resolution", "must be at least 16");
        cfg.resolution = static_cast<int>(*v);
    }

    if (doc.count("stop") == 0) throw ValidationError("stop", "section missing");
    {
        const double t_max = require_number(r, "stop", 0, "t_max");
        require_positive("t_max", t_max);
        cfg.t_max = t_max;
    }

    r.reject_unconsumed();

    // Formation must resolve and satisfy the start-state invariants.
    std::vector<Point> pts = formation_points(cfg.formation, cfg.agent_count);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!cfg.workspace.contains(pts[i])) {
            throw ValidationError("formation",
                                  "point " + std::to_string(i) + " lies outside the workspace");
        }
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (distance(pts[i], pts[j]) < cfg.d_min) {
                throw ValidationError("formation", "points " + std::to_string(i) + " and " +
                                                       std::to_string(j) +
                                                       " start closer than d_min");
            }
        }
    }
    return cfg;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path.string());
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += num(vs[i]);
    }
    return out;
}

}  // namespace

std::string write_scenario(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "[workspace]\n";
    out << "min_x = " << num(cfg.workspace.min_corner.x) << "\n";
    out << "min_y = " << num(cfg.workspace.min_corner.y) << "\n";
    out << "max_x = " << num(cfg.workspace.max_corner.x) << "\n";
    out << "max_y = " << num(cfg.workspace.max_corner.y) << "\n";
    for (const TargetRegion& t : cfg.targets) {
        out << "\n[targets]\n";
        out << "min_x = " << num(t.min_corner.x) << "\n";
        out << "min_y = " << num(t.min_corner.y) << "\n";
        out << "max_x = " << num(t.max_corner.x) << "\n";
        out << "max_y = " << num(t.max_corner.y) << "\n";
    }
    out << "\n[agents]\n";
    out << "count = " << cfg.agent_count << "\n";
    switch (cfg.formation.kind) {
        case Formation::Kind::grid:
            out << "formation = grid\n";
            out << "rows = " << cfg.formation.rows << "\n";
            out << "cols = " << cfg.formation.cols << "\n";
            out << "spacing = " << num(cfg.formation.spacing) << "\n";
            out << "origin_x = " << num(cfg.formation.origin.x) << "\n";
            out << "origin_y = " << num(cfg.formation.origin.y) << "\n";
            break;
        case Formation::Kind::triangle:
            out << "formation = triangle\n";
            out << "rows = " << cfg.formation.rows << "\n";
            out << "spacing = " << num(cfg.formation.spacing) << "\n";
            out << "origin_x = " << num(cfg.formation.origin.x) << "\n";
            out << "origin_y = " << num(cfg.formation.origin.y) << "\n";
            break;
        case Formation::Kind::explicit_points: {
            out << "formation = explicit\n";
            out << "points = ";
            for (std::size_t i = 0; i < cfg.formation.points.size(); ++i) {
                if (i) out << "; ";
                out << num(cfg.formation.points[i].x) << ", " << num(cfg.formation.points[i].y);
            }
            out << "\n";
            break;
        }
    }
    out << "sensor_radius = " << num(cfg.sensor.radius) << "\n";
    out << "\n[density]\n";
    out << "baseline = " << num(cfg.density.baseline) << "\n";
    out << "weight = " << num_list(cfg.density.weights) << "\n";
    out << "sigma_x = " << num_list(cfg.density.sigma_x) << "\n";
    out << "sigma_y = " << num_list(cfg.density.sigma_y) << "\n";
    out << "mask_mode = "
        << (cfg.density.mask_mode == MaskMode::off ? "off" : "detected-region-boost") << "\n";
    out << "region_bonus = " << num(cfg.density.region_bonus) << "\n";
    out << "latch_detection = " << (cfg.latch_detection ? "true" : "false") << "\n";
    out << "\n[gains]\n";
    out << "k = " << num(cfg.gain_k) << "\n";
    out << "gamma = " << num(cfg.gamma) << "\n";
    out << "d_min = " << num(cfg.d_min) << "\n";
    out << "u_max = " << num(cfg.u_max) << "\n";
    out << "\n[numerics]\n";
    out << "dt = " << num(cfg.dt) << "\n";
    out << "resolution = " << cfg.resolution << "\n";
    out << "\n[stop]\n";
    out << "t_max = " << num(cfg.t_max) << "\n";
    return out.str();
}

ScenarioConfig apply_overrides(ScenarioConfig config, const CliOverrides& overrides) {
    if (overrides.dt) {
        if (!(*overrides.dt > 0.0)) throw ValidationError("dt", "must be positive");
        config.dt = *overrides.dt;
    }
    if (overrides.resolution) {
        if (*overrides.resolution < 16) throw ValidationError("resolution", "must be at least 16");
        config.resolution = *overrides.resolution;
    }
    return config;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    auto pts_equal = [](const std::vector<Point>& x, const std::vector<Point>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i] == y[i])) return false;
        }
        return true;
    };
    if (!(a.workspace.min_corner == b.workspace.min_corner &&
          a.workspace.max_corner == b.workspace.max_corner)) {
        return false;
    }
    if (a.targets.size() != b.targets.size()) return false;
    for (std::size_t i = 0; i < a.targets.size(); ++i) {
        if (!(a.targets[i].id == b.targets[i].id &&
              a.targets[i].min_corner == b.targets[i].min_corner &&
              a.targets[i].max_corner == b.targets[i].max_corner)) {
            return false;
        }
    }
    return a.agent_count == b.agent_count && a.formation.kind == b.formation.kind &&
           a.formation.rows == b.formation.rows && a.formation.cols == b.formation.cols &&
           a.formation.spacing == b.formation.spacing &&
           a.formation.origin == b.formation.origin &&
           pts_equal(a.formation.points, b.formation.points) &&
           a.sensor.radius == b.sensor.radius && a.density.baseline == b.density.baseline &&
           a.density.weights == b.density.weights && a.density.sigma_x == b.density.sigma_x &&
           a.density.sigma_y == b.density.sigma_y && a.density.mask_mode == b.density.mask_mode &&
           a.density.region_bonus == b.density.region_bonus &&
           a.latch_detection == b.latch_detection && a.gain_k == b.gain_k && a.gamma == b.gamma &&
           a.d_min == b.d_min && a.u_max == b.u_max && a.dt == b.dt &&
           a.resolution == b.resolution && a.t_max == b.t_max;
}

}  // namespace covsim
