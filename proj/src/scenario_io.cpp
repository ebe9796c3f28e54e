#include "antago/scenario_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

#ifndef ANTAGO_DEFAULT_PRESET_DIR
#define ANTAGO_DEFAULT_PRESET_DIR "presets"
#endif

namespace antago {

ScenarioParseError::ScenarioParseError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line)
{
}

namespace {

struct SectionKeys {
    std::string_view section;
    std::vector<std::string_view> keys;
};

const std::vector<SectionKeys>& schema()
{
    static const std::vector<SectionKeys> table{
        {"plant",
         {"L0", "n_L", "D_s", "d_c", "k0", "K0", "V0", "x0", "x_M", "Gamma0", "rho", "P_atm", "m", "R",
          "domain_margin"}},
        {"gains", {"k_p", "k_m", "k_i", "alpha", "epsilon"}},
        {"force", {"kind", "coefficient"}},
        {"solver", {"method", "rel_tol", "abs_tol", "max_step", "fixed_step", "output_interval"}},
        {"schedule", {"x_star", "duration", "step"}},
        {"initial", {"x", "xdot", "P1", "P2", "F_hat"}},
        {"control", {"mode"}},
        {"scenario", {"name", "description"}},
    };
    return table;
}

const SectionKeys* find_section(std::string_view name)
{
    for (const auto& s : schema()) {
        if (s.section == name) return &s;
    }
    return nullptr;
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string unknown_key_message(const SectionKeys& section, const std::string& key)
{
    std::ostringstream os;
    os << "unknown key '" << key << "' in [" << section.section << "]";
    std::optional<std::string> suggestion;
    for (const auto k : section.keys) {
        if (lower(k) == lower(key)) {
            suggestion = std::string(k);
            break;
        }
    }
    if (!suggestion) {
        std::size_t best = 3;
        for (const auto k : section.keys) {
            const std::size_t d = edit_distance(k, key);
            if (d < best) {
                best = d;
                suggestion = std::string(k);
            }
        }
    }
    if (suggestion) {
        os << "; expected '" << *suggestion << "'";
    } else {
        for (const auto& other : schema()) {
            if (std::find(other.keys.begin(), other.keys.end(), key) != other.keys.end()) {
                os << "; '" << key << "' belongs in [" << other.section << "]";
                break;
            }
        }
    }
    return os.str();
}

struct Entry {
    std::string value;
    int line = 0;
};

struct Document {
    // section -> key -> entries (only `step` may repeat)
    std::map<std::string, std::map<std::string, std::vector<Entry>>> sections;
};

Document tokenize(const std::string& text)
{
    Document doc;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::string current;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view view(raw);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        const std::string line = trim(view);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ScenarioParseError(line_no, "unterminated section header '" + line + "'");
            current = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!find_section(current)) {
                throw ScenarioParseError(line_no, "unknown section [" + current + "]");
            }
            if (doc.sections.count(current) != 0) {
                throw ScenarioParseError(line_no, "duplicate section [" + current + "]");
            }
            doc.sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ScenarioParseError(line_no, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (current.empty()) throw ScenarioParseError(line_no, "key '" + key + "' appears before any section");
        const SectionKeys& section = *find_section(current);
        if (std::find(section.keys.begin(), section.keys.end(), key) == section.keys.end()) {
            throw ScenarioParseError(line_no, unknown_key_message(section, key));
        }
        if (value.empty()) throw ScenarioParseError(line_no, "key '" + key + "' has no value");
        auto& entries = doc.sections[current][key];
        if (!entries.empty() && key != "step") {
            throw ScenarioParseError(line_no, "duplicate key '" + key + "' in [" + current + "] (first on line " +
                                                  std::to_string(entries.front().line) + ")");
        }
        entries.push_back({value, line_no});
    }
    return doc;
}

double number(const Entry& e, const std::string& key)
{
    try {
        return parse_double(e.value);
    } catch (const std::invalid_argument&) {
        throw ScenarioParseError(e.line, "key '" + key + "': '" + e.value + "' is not a number");
    }
}

class SectionReader {
public:
    SectionReader(const Document& doc, std::string name) : name_(std::move(name))
    {
        if (const auto it = doc.sections.find(name_); it != doc.sections.end()) {
            entries_ = &it->second;
        }
    }

    [[nodiscard]] bool present() const { return entries_ != nullptr; }

    [[nodiscard]] const Entry* find(const std::string& key) const
    {
        if (!entries_) return nullptr;
        const auto it = entries_->find(key);
        return it == entries_->end() ? nullptr : &it->second.front();
    }

    [[nodiscard]] std::vector<Entry> all(const std::string& key) const
    {
        if (!entries_) return {};
        const auto it = entries_->find(key);
        return it == entries_->end() ? std::vector<Entry>{} : it->second;
    }

    [[nodiscard]] double required(const std::string& key) const
    {
        const Entry* e = find(key);
        if (!e) throw ScenarioParseError(0, "missing required key '" + key + "' in [" + name_ + "]");
        return number(*e, key);
    }

    [[nodiscard]] double optional(const std::string& key, double fallback) const
    {
        const Entry* e = find(key);
        return e ? number(*e, key) : fallback;
    }

    [[nodiscard]] std::optional<std::string> text(const std::string& key) const
    {
        const Entry* e = find(key);
        return e ? std::optional<std::string>(e->value) : std::nullopt;
    }

    [[nodiscard]] int line(const std::string& key) const
    {
        const Entry* e = find(key);
        return e ? e->line : 0;
    }

private:
    std::string name_;
    const std::map<std::string, std::vector<Entry>>* entries_ = nullptr;
};

template <class Parse>
auto parse_word(const SectionReader& section, const std::string& key, Parse&& parse)
{
    const auto value = section.text(key);
    try {
        return parse(*value);
    } catch (const std::invalid_argument& e) {
        throw ScenarioParseError(section.line(key), e.what());
    }
}

void rederive_scale(ActuatorGeometry& g, bool from_k0)
{
    if (from_k0) {
        g.K0 = g.k0 * g.shape_factor();
    } else {
        g.k0 = g.K0 / g.shape_factor();
    }
}

}  // namespace

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf.data(), ptr);
}

double parse_double(const std::string& text)
{
    const std::string s = trim(text);
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || s.empty()) {
        throw std::invalid_argument("'" + text + "' is not a number");
    }
    return value;
}

ScenarioConfig parse_scenario(const std::string& text)
{
    const Document doc = tokenize(text);
    ScenarioConfig sc;

    for (const char* needed : {"plant", "gains", "force", "schedule"}) {
        if (doc.sections.count(needed) == 0) {
            throw ScenarioParseError(0, std::string("missing section [") + needed + "]");
        }
    }

    const SectionReader plant(doc, "plant");
    PlantParams& params = sc.params;
    ActuatorGeometry& g = params.geometry;
    g.L0 = plant.required("L0");
    {
        const double nL = plant.required("n_L");
        if (nL != std::floor(nL) || nL < 1.0) {
            throw ScenarioParseError(plant.line("n_L"), "n_L must be a positive integer");
        }
        g.n_L = static_cast<int>(nL);
    }
    g.D_s = plant.required("D_s");
    g.d_c = plant.required("d_c");
    g.V0 = plant.required("V0");
    g.x0 = plant.required("x0");
    g.x_M = plant.required("x_M");
    g.domain_margin = plant.optional("domain_margin", 1e-6);
    const bool has_k0 = plant.find("k0") != nullptr;
    const bool has_K0 = plant.find("K0") != nullptr;
    if (!has_k0 && !has_K0) throw ScenarioParseError(0, "[plant] needs k0 or K0");
    if (has_k0) g.k0 = plant.required("k0");
    if (has_K0) g.K0 = plant.required("K0");
    if (!has_k0) rederive_scale(g, false);
    if (!has_K0) rederive_scale(g, true);
    params.fluid.Gamma0 = plant.required("Gamma0");
    params.fluid.rho = plant.required("rho");
    params.fluid.P_atm = plant.optional("P_atm", 1e5);
    params.m = plant.required("m");
    params.R = plant.required("R");

    const SectionReader gains(doc, "gains");
    sc.gains = {gains.required("k_p"), gains.required("k_m"), gains.required("k_i"), gains.required("alpha")};
    sc.epsilon = gains.optional("epsilon", 0.0);

    const SectionReader force(doc, "force");
    if (!force.find("kind")) throw ScenarioParseError(0, "missing required key 'kind' in [force]");
    sc.force.kind = parse_word(force, "kind", parse_force_kind);
    sc.force.coefficient = force.required("coefficient");

    const SectionReader solver(doc, "solver");
    if (solver.find("method")) sc.solver.method = parse_word(solver, "method", parse_solver_method);
    sc.solver.rel_tol = solver.optional("rel_tol", sc.solver.rel_tol);
    sc.solver.abs_tol = solver.optional("abs_tol", sc.solver.abs_tol);
    sc.solver.max_step = solver.optional("max_step", sc.solver.max_step);
    sc.solver.fixed_step = solver.optional("fixed_step", sc.solver.fixed_step);
    sc.solver.output_interval = solver.optional("output_interval", sc.solver.output_interval);

    const SectionReader schedule(doc, "schedule");
    sc.duration = schedule.required("duration");
    sc.schedule = {{0.0, schedule.required("x_star")}};
    for (const Entry& e : schedule.all("step")) {
        const auto comma = e.value.find(',');
        if (comma == std::string::npos) {
            throw ScenarioParseError(e.line, "step must be '<time>, <x_star>'");
        }
        const Entry time{e.value.substr(0, comma), e.line};
        const Entry target{e.value.substr(comma + 1), e.line};
        sc.schedule.push_back({number(time, "step"), number(target, "step")});
    }

    const SectionReader initial(doc, "initial");
    sc.initial.x = initial.optional("x", 0.0);
    sc.initial.xdot = initial.optional("xdot", 0.0);
    sc.initial.P1 = initial.optional("P1", 0.0);
    sc.initial.P2 = initial.optional("P2", 0.0);
    if (initial.find("F_hat")) sc.initial.F_hat = initial.required("F_hat");

    const SectionReader control(doc, "control");
    if (control.find("mode")) sc.mode = parse_word(control, "mode", parse_control_mode);

    const SectionReader meta(doc, "scenario");
    sc.name = meta.text("name").value_or("");

    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioParseError(0, std::string("invalid scenario: ") + e.what());
    }
    return sc;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        ScenarioConfig sc = parse_scenario(buf.str());
        if (sc.name.empty()) sc.name = path.stem().string();
        return sc;
    } catch (const ScenarioParseError& e) {
        throw ScenarioParseError(e.line(), path.string() + ": " + e.what());
    }
}

std::string scenario_description(const std::string& text)
{
    std::istringstream in(text);
    std::string raw;
    bool in_meta = false;
    while (std::getline(in, raw)) {
        const std::string line = trim(raw);
        if (!line.empty() && line.front() == '[') {
            in_meta = line == "[scenario]";
            continue;
        }
        if (in_meta && line.rfind("description", 0) == 0) {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string_view v = std::string_view(line).substr(eq + 1);
                if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
                return trim(v);
            }
        }
    }
    return {};
}

std::string serialize_scenario(const ScenarioConfig& sc)
{
    const auto f = format_double;
    const ActuatorGeometry& g = sc.params.geometry;
    std::ostringstream os;
    if (!sc.name.empty()) {
        os << "[scenario]\nname = " << sc.name << "\n\n";
    }
    os << "[plant]\n"
       << "L0 = " << f(g.L0) << "\n"
       << "n_L = " << g.n_L << "\n"
       << "D_s = " << f(g.D_s) << "\n"
       << "d_c = " << f(g.d_c) << "\n"
       << "k0 = " << f(g.k0) << "\n"
       << "K0 = " << f(g.K0) << "\n"
       << "V0 = " << f(g.V0) << "\n"
       << "x0 = " << f(g.x0) << "\n"
       << "x_M = " << f(g.x_M) << "\n"
       << "domain_margin = " << f(g.domain_margin) << "\n"
       << "Gamma0 = " << f(sc.params.fluid.Gamma0) << "\n"
       << "rho = " << f(sc.params.fluid.rho) << "\n"
       << "P_atm = " << f(sc.params.fluid.P_atm) << "\n"
       << "m = " << f(sc.params.m) << "\n"
       << "R = " << f(sc.params.R) << "\n\n";
    os << "[gains]\n"
       << "k_p = " << f(sc.gains.k_p) << "\n"
       << "k_m = " << f(sc.gains.k_m) << "\n"
       << "k_i = " << f(sc.gains.k_i) << "\n"
       << "alpha = " << f(sc.gains.alpha) << "\n"
       << "epsilon = " << f(sc.epsilon) << "\n\n";
    os << "[force]\n"
       << "kind = " << to_string(sc.force.kind) << "\n"
       << "coefficient = " << f(sc.force.coefficient) << "\n\n";
    os << "[solver]\n"
       << "method = " << to_string(sc.solver.method) << "\n"
       << "rel_tol = " << f(sc.solver.rel_tol) << "\n"
       << "abs_tol = " << f(sc.solver.abs_tol) << "\n"
       << "max_step = " << f(sc.solver.max_step) << "\n"
       << "fixed_step = " << f(sc.solver.fixed_step) << "\n"
       << "output_interval = " << f(sc.solver.output_interval) << "\n\n";
    os << "[schedule]\n"
       << "x_star = " << f(sc.schedule.front().x_star) << "\n"
       << "duration = " << f(sc.duration) << "\n";
    for (std::size_t i = 1; i < sc.schedule.size(); ++i) {
        os << "step = " << f(sc.schedule[i].time) << ", " << f(sc.schedule[i].x_star) << "\n";
    }
    os << "\n[initial]\n"
       << "x = " << f(sc.initial.x) << "\n"
       << "xdot = " << f(sc.initial.xdot) << "\n"
       << "P1 = " << f(sc.initial.P1) << "\n"
       << "P2 = " << f(sc.initial.P2) << "\n";
    if (sc.initial.F_hat) {
        os << "F_hat = " << f(*sc.initial.F_hat) << "\n";
    }
    os << "\n[control]\nmode = " << to_string(sc.mode) << "\n";
    return os.str();
}

std::vector<std::string> scenario_scalar_keys()
{
    std::vector<std::string> keys;
    for (const auto& section : schema()) {
        for (const auto k : section.keys) {
            if (k == "kind" || k == "method" || k == "mode" || k == "step" || k == "name" || k == "description" ||
                k == "n_L") {
                continue;
            }
            keys.emplace_back(k);
        }
    }
    return keys;
}

namespace {

double* scalar_slot(ScenarioConfig& sc, const std::string& key)
{
    static const auto table = [] {
        using Getter = double* (*)(ScenarioConfig&);
        return std::vector<std::pair<std::string_view, Getter>>{
            {"L0", [](ScenarioConfig& s) { return &s.params.geometry.L0; }},
            {"D_s", [](ScenarioConfig& s) { return &s.params.geometry.D_s; }},
            {"d_c", [](ScenarioConfig& s) { return &s.params.geometry.d_c; }},
            {"k0", [](ScenarioConfig& s) { return &s.params.geometry.k0; }},
            {"K0", [](ScenarioConfig& s) { return &s.params.geometry.K0; }},
            {"V0", [](ScenarioConfig& s) { return &s.params.geometry.V0; }},
            {"x0", [](ScenarioConfig& s) { return &s.params.geometry.x0; }},
            {"x_M", [](ScenarioConfig& s) { return &s.params.geometry.x_M; }},
            {"domain_margin", [](ScenarioConfig& s) { return &s.params.geometry.domain_margin; }},
            {"Gamma0", [](ScenarioConfig& s) { return &s.params.fluid.Gamma0; }},
            {"rho", [](ScenarioConfig& s) { return &s.params.fluid.rho; }},
            {"P_atm", [](ScenarioConfig& s) { return &s.params.fluid.P_atm; }},
            {"m", [](ScenarioConfig& s) { return &s.params.m; }},
            {"R", [](ScenarioConfig& s) { return &s.params.R; }},
            {"k_p", [](ScenarioConfig& s) { return &s.gains.k_p; }},
            {"k_m", [](ScenarioConfig& s) { return &s.gains.k_m; }},
            {"k_i", [](ScenarioConfig& s) { return &s.gains.k_i; }},
            {"alpha", [](ScenarioConfig& s) { return &s.gains.alpha; }},
            {"epsilon", [](ScenarioConfig& s) { return &s.epsilon; }},
            {"coefficient", [](ScenarioConfig& s) { return &s.force.coefficient; }},
            {"rel_tol", [](ScenarioConfig& s) { return &s.solver.rel_tol; }},
            {"abs_tol", [](ScenarioConfig& s) { return &s.solver.abs_tol; }},
            {"max_step", [](ScenarioConfig& s) { return &s.solver.max_step; }},
            {"fixed_step", [](ScenarioConfig& s) { return &s.solver.fixed_step; }},
            {"output_interval", [](ScenarioConfig& s) { return &s.solver.output_interval; }},
            {"x_star", [](ScenarioConfig& s) { return &s.schedule.front().x_star; }},
            {"duration", [](ScenarioConfig& s) { return &s.duration; }},
            {"x", [](ScenarioConfig& s) { return &s.initial.x; }},
            {"xdot", [](ScenarioConfig& s) { return &s.initial.xdot; }},
            {"P1", [](ScenarioConfig& s) { return &s.initial.P1; }},
            {"P2", [](ScenarioConfig& s) { return &s.initial.P2; }},
        };
    }();
    for (const auto& [name, getter] : table) {
        if (name == key) return getter(sc);
    }
    return nullptr;
}

std::string strip_section(const std::string& key)
{
    const auto dot = key.find('.');
    return dot == std::string::npos ? key : key.substr(dot + 1);
}

}  // namespace

void set_scenario_value(ScenarioConfig& scenario, const std::string& dotted_key, double value)
{
    const std::string key = strip_section(dotted_key);
    if (key == "F_hat") {
        scenario.initial.F_hat = value;
        return;
    }
    double* slot = scalar_slot(scenario, key);
    if (!slot) throw std::invalid_argument("'" + dotted_key + "' is not a scalar scenario key");
    *slot = value;
    ActuatorGeometry& g = scenario.params.geometry;
    if (key == "k0") {
        rederive_scale(g, true);
    } else if (key == "K0" || key == "L0" || key == "D_s" || key == "d_c") {
        rederive_scale(g, false);
    }
}

double get_scenario_value(const ScenarioConfig& scenario, const std::string& dotted_key)
{
    const std::string key = strip_section(dotted_key);
    if (key == "F_hat") {
        return scenario.initial_observer().F_hat;
    }
    auto& mutable_scenario = const_cast<ScenarioConfig&>(scenario);
    const double* slot = scalar_slot(mutable_scenario, key);
    if (!slot) throw std::invalid_argument("'" + dotted_key + "' is not a scalar scenario key");
    return *slot;
}

const std::vector<std::string>& trajectory_columns()
{
    static const std::vector<std::string> columns{"t",   "x",      "xdot",  "p",     "P1",      "P2",
                                                  "U1",  "U2",     "F_hat", "F_tilde", "F_true", "zeta",
                                                  "sigma", "H",    "H_d",   "Psi",   "x_star"};
    return columns;
}

namespace {

constexpr std::array<double TrajectorySample::*, 17> kFields{
    &TrajectorySample::t,     &TrajectorySample::x,       &TrajectorySample::xdot,   &TrajectorySample::p,
    &TrajectorySample::P1,    &TrajectorySample::P2,      &TrajectorySample::U1,     &TrajectorySample::U2,
    &TrajectorySample::F_hat, &TrajectorySample::F_tilde, &TrajectorySample::F_true, &TrajectorySample::zeta,
    &TrajectorySample::sigma, &TrajectorySample::H,       &TrajectorySample::H_d,    &TrajectorySample::Psi,
    &TrajectorySample::x_star};

}  // namespace

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& samples)
{
    const auto& columns = trajectory_columns();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i ? "," : "") << columns[i];
    }
    out << '\n';
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < kFields.size(); ++i) {
            out << (i ? "," : "") << format_double(s.*kFields[i]);
        }
        out << '\n';
    }
}

std::vector<TrajectorySample> read_trajectory_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trajectory CSV");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    if (header != trajectory_columns()) throw std::runtime_error("unexpected trajectory CSV header");

    std::vector<TrajectorySample> samples;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        TrajectorySample s;
        std::istringstream ls(line);
        std::string cell;
        std::size_t i = 0;
        while (std::getline(ls, cell, ',')) {
            if (i >= kFields.size()) throw std::runtime_error("row " + std::to_string(row) + ": too many columns");
            s.*kFields[i++] = parse_double(cell);
        }
        if (i != kFields.size()) throw std::runtime_error("row " + std::to_string(row) + ": too few columns");
        samples.push_back(s);
    }
    return samples;
}

std::vector<std::pair<std::string, std::string>> diagnostics_fields(const DiagnosticsSummary& d,
                                                                   const TrajectoryRecord& record)
{
    const auto f = format_double;
    const auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    const StabilityReport& gain = record.gain_report.at_point;
    const StabilityReport& worst = record.gain_report.worst_case;
    return {
        {"status", d.status},
        {"samples", std::to_string(d.samples)},
        {"t_final", f(d.t_final)},
        {"steps_accepted", std::to_string(record.stats.accepted)},
        {"steps_rejected", std::to_string(record.stats.rejected)},
        {"x_star", f(d.x_star)},
        {"final_position_error", f(d.final_position_error)},
        {"final_momentum", f(d.final_momentum)},
        {"final_sigma", f(d.final_sigma)},
        {"final_pressure_balance", f(d.final_pressure_balance)},
        {"final_F_tilde", f(d.final_F_tilde)},
        {"final_F_true", f(d.final_F_true)},
        {"settle_time", f(d.settle_time)},
        {"settled", flag(d.settled)},
        {"max_psi", f(d.max_psi)},
        {"max_psi_increment", f(d.max_psi_increment)},
        {"max_psi_rise", f(d.max_psi_rise)},
        {"alpha", f(d.alpha)},
        {"zeta_decay_rate", f(d.zeta_decay_rate)},
        {"zeta_fit_points", std::to_string(d.zeta_fit_points)},
        {"symmetric_touches", std::to_string(d.symmetric_touches)},
        {"symmetric_crossings", std::to_string(d.symmetric_crossings)},
        {"epsilon", f(gain.epsilon)},
        {"gains_valid", flag(gain.valid())},
        {"gains_margin", f(gain.margin)},
        {"condition_product", f(gain.condition_product)},
        {"required_product", f(gain.required_product)},
        {"alpha_bound", f(gain.alpha_bound)},
        {"alpha_below_bound", flag(gain.alpha_below_bound)},
        {"km_window_exists", flag(gain.km_window_exists)},
        {"gains_valid_worst_case", flag(worst.valid())},
        {"condition_product_worst_case", f(worst.condition_product)},
    };
}

std::string format_diagnostics(const DiagnosticsSummary& d, const TrajectoryRecord& record)
{
    std::ostringstream os;
    if (!record.message.empty()) os << "message = " << record.message << "\n";
    for (const auto& [key, value] : diagnostics_fields(d, record)) {
        os << key << " = " << value << "\n";
    }
    return os.str();
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("error while writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::filesystem::path preset_directory()
{
    if (const char* env = std::getenv("ANTAGO_PRESET_DIR"); env && *env) {
        return env;
    }
    return ANTAGO_DEFAULT_PRESET_DIR;
}

std::vector<PresetInfo> list_presets(const std::filesystem::path& directory)
{
    std::vector<PresetInfo> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(directory, ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".scn") continue;
        std::ifstream in(entry.path());
        std::ostringstream buf;
        buf << in.rdbuf();
        out.push_back({entry.path().stem().string(), entry.path(), scenario_description(buf.str())});
    }
    std::sort(out.begin(), out.end(), [](const PresetInfo& a, const PresetInfo& b) { return a.name < b.name; });
    return out;
}

std::filesystem::path resolve_scenario_path(const std::string& name_or_path, const std::filesystem::path& directory)
{
    const std::filesystem::path direct(name_or_path);
    if (std::filesystem::is_regular_file(direct)) return direct;
    const std::filesystem::path preset = directory / (name_or_path + ".scn");
    if (std::filesystem::is_regular_file(preset)) return preset;
    std::string available;
    if (std::filesystem::is_directory(directory)) {
        for (const auto& p : list_presets(directory)) available += (available.empty() ? "" : ", ") + p.name;
    }
    throw std::runtime_error("no scenario file or preset named '" + name_or_path + "' (preset directory " +
                             directory.string() + (available.empty() ? "" : "; available: " + available) + ")");
}

}  // namespace antago
