#include "resobs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace resobs {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

// Conversion failures are reported as std::invalid_argument and re-thrown by
// the caller as a ConfigError carrying key and line.
double to_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

std::uint64_t to_uint(std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
}

bool to_bool(std::string_view s) {
    if (s == "true" || s == "1") {
        return true;
    }
    if (s == "false" || s == "0") {
        return false;
    }
    throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
}

std::vector<double> to_values(std::string_view s) {
    if (s.empty()) {
        return {};
    }
    if (s.find(':') != std::string_view::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) {
            throw std::invalid_argument("range must be A:inc:B");
        }
        return range_list(to_double(parts[0]), to_double(parts[1]), to_double(parts[2]));
    }
    std::vector<double> out;
    for (auto part : split(s, ',')) {
        out.push_back(to_double(part));
    }
    return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

double positive(std::string_view s, const char* what) {
    const double v = to_double(s);
    require(v > 0.0 && std::isfinite(v), std::string(what) + " must be positive and finite");
    return v;
}

double finite(std::string_view s) {
    const double v = to_double(s);
    require(std::isfinite(v), "value must be finite");
    return v;
}

struct Field {
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"n",
         [](RunConfig& c, std::string_view v) {
             const auto n = to_uint(v);
             require(n >= 2, "reservoir size n must be >= 2");
             c.reservoir.n = static_cast<std::size_t>(n);
         },
         [](const RunConfig& c) { return std::to_string(c.reservoir.n); }},
        {"rho", [](RunConfig& c, std::string_view v) { c.reservoir.rho = positive(v, "rho"); },
         [](const RunConfig& c) { return format_shortest(c.reservoir.rho); }},
        {"mean_degree",
         [](RunConfig& c, std::string_view v) { c.reservoir.mean_degree = positive(v, "mean_degree"); },
         [](const RunConfig& c) { return format_shortest(c.reservoir.mean_degree); }},
        {"zeta", [](RunConfig& c, std::string_view v) { c.reservoir.zeta = finite(v); },
         [](const RunConfig& c) { return format_shortest(c.reservoir.zeta); }},
        {"alpha",
         [](RunConfig& c, std::string_view v) {
             const double a = to_double(v);
             require(a > 0.0 && a <= 1.0, "leakage rate must satisfy 0 < alpha <= 1");
             c.reservoir.alpha = a;
         },
         [](const RunConfig& c) { return format_shortest(c.reservoir.alpha); }},
        {"input_scale",
         [](RunConfig& c, std::string_view v) {
             const double s = finite(v);
             require(s >= 0.0, "input_scale must be >= 0");
             c.reservoir.input_scale = s;
         },
         [](const RunConfig& c) { return format_shortest(c.reservoir.input_scale); }},
        {"ridge_beta",
         [](RunConfig& c, std::string_view v) {
             const double b = finite(v);
             require(b >= 0.0, "ridge_beta must be >= 0");
             c.reservoir.ridge_beta = b;
         },
         [](const RunConfig& c) { return format_shortest(c.reservoir.ridge_beta); }},
        {"topology",
         [](RunConfig& c, std::string_view v) { c.reservoir.topology = parse_topology_kind(v); },
         [](const RunConfig& c) { return std::string(to_string(c.reservoir.topology)); }},
        {"rewire_prob",
         [](RunConfig& c, std::string_view v) {
             const double p = to_double(v);
             require(p >= 0.0 && p <= 1.0, "rewire_prob must lie in [0, 1]");
             c.reservoir.rewire_prob = p;
         },
         [](const RunConfig& c) { return format_shortest(c.reservoir.rewire_prob); }},
        {"a", [](RunConfig& c, std::string_view v) { c.rossler.a = finite(v); },
         [](const RunConfig& c) { return format_shortest(c.rossler.a); }},
        {"b", [](RunConfig& c, std::string_view v) { c.rossler.b = finite(v); },
         [](const RunConfig& c) { return format_shortest(c.rossler.b); }},
        {"c", [](RunConfig& c, std::string_view v) { c.rossler.c = finite(v); },
         [](const RunConfig& c) { return format_shortest(c.rossler.c); }},
        {"x0", [](RunConfig& c, std::string_view v) { c.initial_state.x = finite(v); },
         [](const RunConfig& c) { return format_shortest(c.initial_state.x); }},
        {"y0", [](RunConfig& c, std::string_view v) { c.initial_state.y = finite(v); },
         [](const RunConfig& c) { return format_shortest(c.initial_state.y); }},
        {"z0", [](RunConfig& c, std::string_view v) { c.initial_state.z = finite(v); },
         [](const RunConfig& c) { return format_shortest(c.initial_state.z); }},
        {"dt", [](RunConfig& c, std::string_view v) { c.times.dt = positive(v, "dt"); },
         [](const RunConfig& c) { return format_shortest(c.times.dt); }},
        {"t0",
         [](RunConfig& c, std::string_view v) {
             const double t = finite(v);
             require(t >= 0.0, "t0 must be >= 0");
             c.times.t0 = t;
         },
         [](const RunConfig& c) { return format_shortest(c.times.t0); }},
        {"t1", [](RunConfig& c, std::string_view v) { c.times.t1 = positive(v, "t1"); },
         [](const RunConfig& c) { return format_shortest(c.times.t1); }},
        {"t2", [](RunConfig& c, std::string_view v) { c.times.t2 = positive(v, "t2"); },
         [](const RunConfig& c) { return format_shortest(c.times.t2); }},
        {"seed", [](RunConfig& c, std::string_view v) { c.seed = to_uint(v); },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
        {"seeds_per_value",
         [](RunConfig& c, std::string_view v) {
             const auto s = to_uint(v);
             require(s >= 1, "seeds_per_value must be >= 1");
             c.seeds_per_value = static_cast<std::size_t>(s);
         },
         [](const RunConfig& c) { return std::to_string(c.seeds_per_value); }},
        {"workers",
         [](RunConfig& c, std::string_view v) {
             const auto w = to_uint(v);
             require(w >= 1, "workers must be >= 1");
             c.workers = static_cast<std::size_t>(w);
         },
         [](const RunConfig& c) { return std::to_string(c.workers); }},
        {"out_dir",
         [](RunConfig& c, std::string_view v) {
             require(!v.empty(), "out_dir must not be empty");
             c.out_dir = std::string(v);
         },
         [](const RunConfig& c) { return c.out_dir; }},
        {"values", [](RunConfig& c, std::string_view v) { c.values = to_values(v); },
         [](const RunConfig& c) {
             std::string out;
             for (std::size_t i = 0; i < c.values.size(); ++i) {
                 out += (i ? "," : "") + format_shortest(c.values[i]);
             }
             return out;
         }},
        {"kinds",
         [](RunConfig& c, std::string_view v) {
             std::vector<TopologyKind> kinds;
             for (auto part : split(v, ',')) {
                 kinds.push_back(parse_topology_kind(part));
             }
             require(!kinds.empty(), "kinds must name at least one topology");
             c.kinds = std::move(kinds);
         },
         [](const RunConfig& c) {
             std::string out;
             for (std::size_t i = 0; i < c.kinds.size(); ++i) {
                 out += (i ? "," : "") + std::string(to_string(c.kinds[i]));
             }
             return out;
         }},
        {"self_test", [](RunConfig& c, std::string_view v) { c.self_test = to_bool(v); },
         [](const RunConfig& c) { return bool_text(c.self_test); }},
        {"record_timing", [](RunConfig& c, std::string_view v) { c.record_timing = to_bool(v); },
         [](const RunConfig& c) { return bool_text(c.record_timing); }},
    };
    return table;
}

const Field* find_field(std::string_view key) {
    for (const Field& f : fields()) {
        if (f.name == key) {
            return &f;
        }
    }
    return nullptr;
}

std::string location(const std::string& key, std::size_t line) {
    return line ? "line " + std::to_string(line) + ", key '" + key + "'" : "key '" + key + "'";
}

} // namespace

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& message)
    : ParameterError("config " + location(key, line) + ": " + message), key_(std::move(key)),
      line_(line) {}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const Field& f : fields()) {
            k.push_back(f.name);
        }
        return k;
    }();
    return keys;
}

std::string format_shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void ConfigBuilder::set(std::string_view key, std::string_view value, std::size_t line) {
    const Field* field = find_field(key);
    if (!field) {
        throw ConfigError(std::string(key), line, "unknown key");
    }
    try {
        field->set(config_, value);
    } catch (const std::exception& e) {
        throw ConfigError(std::string(key), line, e.what());
    }
    lines_[std::string(key)] = line;
}

void ConfigBuilder::apply_assignment(std::string_view assignment, std::size_t line) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(std::string(trim(assignment)), line, "expected key=value");
    }
    const auto key = trim(assignment.substr(0, eq));
    if (key.empty()) {
        throw ConfigError("", line, "missing key before '='");
    }
    set(key, trim(assignment.substr(eq + 1)), line);
}

void ConfigBuilder::apply_document(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? text.size() - start : end - start);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty()) {
            apply_assignment(line, line_no);
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
}

RunConfig ConfigBuilder::finish() const {
    auto line_of = [this](const std::string& key) {
        auto it = lines_.find(key);
        return it == lines_.end() ? std::size_t{0} : it->second;
    };
    // Report cross-field failures against the most recently set key involved.
    auto blame = [&](std::initializer_list<const char*> keys) {
        std::string chosen = *keys.begin();
        std::size_t best = 0;
        for (const char* k : keys) {
            if (line_of(k) > best) {
                best = line_of(k);
                chosen = k;
            }
        }
        return std::pair{chosen, best};
    };
    try {
        config_.times.validate();
    } catch (const std::exception& e) {
        auto [key, line] = blame({"t0", "t1", "t2", "dt"});
        throw ConfigError(key, line, e.what());
    }
    try {
        config_.reservoir.validate();
    } catch (const std::exception& e) {
        auto [key, line] = blame({"mean_degree", "n", "topology", "rewire_prob"});
        throw ConfigError(key, line, e.what());
    }
    return config_;
}

RunConfig parse_config(std::string_view text) {
    ConfigBuilder builder;
    builder.apply_document(text);
    return builder.finish();
}

std::string format_config(const RunConfig& config) {
    std::ostringstream out;
    for (const Field& f : fields()) {
        out << f.name << '=' << f.get(config) << '\n';
    }
    return out.str();
}

ExperimentPlan make_plan(const RunConfig& config, std::optional<SweepParameter> swept) {
    ExperimentPlan plan;
    plan.base_config = config.reservoir;
    plan.base_config.seed = config.seed;
    plan.rossler = config.rossler;
    plan.initial_state = config.initial_state;
    plan.times = config.times;
    plan.swept = swept;
    if (swept) {
        plan.values = config.values.empty() ? default_sweep_values(*swept) : config.values;
    }
    plan.seeds_per_value = config.seeds_per_value;
    plan.master_seed = config.seed;
    plan.workers = config.workers;
    plan.self_test = config.self_test;
    plan.record_timing = config.record_timing;
    return plan;
}

} // namespace resobs
