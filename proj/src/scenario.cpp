#include "lwp/scenario.hpp"

#include "lwp/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace lwp {

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::Renewal: return "renewal";
        case Mode::Linearwise: return "linearwise";
        case Mode::Bounds: return "bounds";
        case Mode::KeyRenewal: return "key-renewal";
    }
    return "?";
}

LinearwiseProcess Scenario::process() const {
    if (!chain) throw Error(ErrorCode::InvalidArgument, "scenario " + name + " has no chain");
    return LinearwiseProcess(EmbeddedChain(chain->states, chain->matrix), level_laws, initial_state, initial_age);
}

namespace {

constexpr std::string_view kSupportedKinds = "exponential, uniform, gamma, deterministic, discrete, empirical, mixture";

std::string where(const YAML::Node& node, std::string_view field) {
    std::string out = "field '" + std::string(field) + "'";
    if (node.IsDefined() && node.Mark().line >= 0) out = "line " + std::to_string(node.Mark().line + 1) + ", " + out;
    return out;
}

[[noreturn]] void parse_fail(const YAML::Node& node, std::string_view field, const std::string& msg) {
    throw Error(ErrorCode::ParseError, where(node, field) + ": " + msg);
}

[[noreturn]] void invalid(const YAML::Node& node, std::string_view field, const std::string& msg) {
    throw Error(ErrorCode::ValidationError, where(node, field) + ": " + msg);
}

double number(const YAML::Node& node, std::string_view field) {
    if (!node.IsScalar()) parse_fail(node, field, "expected a number");
    const std::string& text = node.Scalar();
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) parse_fail(node, field, "'" + text + "' is not a number");
    return v;
}

long long integer(const YAML::Node& node, std::string_view field) {
    if (!node.IsScalar()) parse_fail(node, field, "expected an integer");
    const std::string& text = node.Scalar();
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        parse_fail(node, field, "'" + text + "' is not an integer");
    return v;
}

std::size_t count(const YAML::Node& node, std::string_view field) {
    const long long v = integer(node, field);
    if (v <= 0) invalid(node, field, "must be positive");
    return static_cast<std::size_t>(v);
}

bool boolean(const YAML::Node& node, std::string_view field) {
    if (!node.IsScalar()) parse_fail(node, field, "expected true or false");
    const std::string& text = node.Scalar();
    if (text == "true") return true;
    if (text == "false") return false;
    parse_fail(node, field, "'" + text + "' is not true or false");
}

std::string text(const YAML::Node& node, std::string_view field) {
    if (!node.IsScalar()) parse_fail(node, field, "expected a string");
    return node.Scalar();
}

std::vector<double> numbers(const YAML::Node& node, std::string_view field) {
    if (!node.IsSequence()) parse_fail(node, field, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& item : node) out.push_back(number(item, field));
    return out;
}

const YAML::Node& map_node(const YAML::Node& node, std::string_view field) {
    if (!node.IsMap()) parse_fail(node, field, "expected a mapping");
    return node;
}

YAML::Node required(const YAML::Node& parent, const std::string& key, std::string_view context) {
    YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) parse_fail(parent, std::string(context) + "." + key, "missing");
    return n;
}

void only_keys(const YAML::Node& node, std::string_view context, std::initializer_list<std::string_view> keys) {
    for (const auto& kv : node) {
        const std::string key = kv.first.Scalar();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            parse_fail(kv.first, std::string(context) + "." + key, "unknown key");
    }
}

template <class F>
auto build(const YAML::Node& node, std::string_view field, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        std::string msg = e.what();
        const std::string prefix = "ValidationError: ";
        if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
        invalid(node, field, msg);
    }
}

Distribution parse_distribution(const YAML::Node& node, const std::string& field) {
    map_node(node, field);
    const std::string kind = text(required(node, "kind", field), field + ".kind");
    auto param = [&](const char* key) { return number(required(node, key, field), field + "." + key); };

    if (kind == "exponential") {
        only_keys(node, field, {"kind", "rate"});
        const double rate = param("rate");
        return build(node, field, [&] { return Distribution::exponential(rate); });
    }
    if (kind == "uniform") {
        only_keys(node, field, {"kind", "lo", "hi"});
        const double lo = param("lo");
        const double hi = param("hi");
        return build(node, field, [&] { return Distribution::uniform(lo, hi); });
    }
    if (kind == "gamma") {
        only_keys(node, field, {"kind", "shape", "scale"});
        const double shape = param("shape");
        const double scale = param("scale");
        return build(node, field, [&] { return Distribution::gamma(shape, scale); });
    }
    if (kind == "deterministic") {
        only_keys(node, field, {"kind", "value"});
        const double v = param("value");
        return build(node, field, [&] { return Distribution::deterministic(v); });
    }
    if (kind == "discrete") {
        only_keys(node, field, {"kind", "points"});
        const YAML::Node pts = required(node, "points", field);
        if (!pts.IsSequence()) parse_fail(pts, field + ".points", "expected a list of [value, probability] pairs");
        std::vector<std::pair<double, double>> points;
        for (const auto& p : pts) {
            if (!p.IsSequence() || p.size() != 2)
                parse_fail(p, field + ".points", "expected a [value, probability] pair");
            points.emplace_back(number(p[0], field + ".points"), number(p[1], field + ".points"));
        }
        return build(node, field, [&] { return Distribution::discrete(points); });
    }
    if (kind == "empirical") {
        only_keys(node, field, {"kind", "samples"});
        auto samples = numbers(required(node, "samples", field), field + ".samples");
        return build(node, field, [&] { return Distribution::empirical(samples); });
    }
    if (kind == "mixture") {
        only_keys(node, field, {"kind", "weights", "components"});
        auto weights = numbers(required(node, "weights", field), field + ".weights");
        const YAML::Node comps = required(node, "components", field);
        if (!comps.IsSequence()) parse_fail(comps, field + ".components", "expected a list of distributions");
        std::vector<Distribution> parts;
        for (std::size_t i = 0; i < comps.size(); ++i)
            parts.push_back(parse_distribution(comps[i], field + ".components[" + std::to_string(i) + "]"));
        return build(node, field, [&] { return Distribution::mixture(weights, parts); });
    }
    parse_fail(node["kind"], field + ".kind",
               "unknown kind '" + kind + "' (supported: " + std::string(kSupportedKinds) + ")");
}

struct CheckRule {
    std::vector<Mode> modes;
    std::vector<std::string_view> required;
};

const std::map<std::string, CheckRule, std::less<>>& check_rules() {
    using enum Mode;
    static const std::map<std::string, CheckRule, std::less<>> rules = {
        {"renewal-poisson", {{Renewal}, {"tolerance"}}},
        {"renewal-value", {{Renewal}, {"t", "value", "tolerance"}}},
        {"overjump-survival", {{Renewal}, {"s", "t", "tolerance"}}},
        {"overjump-mean", {{Renewal}, {"t"}}},
        {"key-renewal", {{KeyRenewal}, {"t", "tolerance"}}},
        {"query", {{Linearwise}, {"state", "a", "b"}}},
        {"normalization", {{Linearwise}, {"tolerance"}}},
        {"start-independence", {{Linearwise}, {"state", "a", "b", "from"}}},
        {"level-probability", {{Linearwise}, {"state", "value", "tolerance"}}},
        {"cycle-length", {{Linearwise}, {"state", "count"}}},
        {"degeneration", {{Linearwise}, {"t", "tolerance"}}},
        {"mean-curve", {{Bounds}, {"times"}}},
        {"underjump-curve", {{Bounds}, {"times"}}},
        {"monotonicity-gap", {{Bounds}, {"count", "t"}}},
        {"power-moment", {{Bounds}, {"k", "t"}}},
        {"exp-moment", {{Bounds}, {"alpha", "t"}}},
        {"conditional-bound", {{Bounds, Linearwise}, {"state", "t"}}},
    };
    return rules;
}

std::string known_check_types() {
    std::string out;
    for (const auto& [name, rule] : check_rules()) out += (out.empty() ? "" : ", ") + name;
    return out;
}

Check parse_check(const YAML::Node& node, std::size_t index, Mode mode) {
    const std::string field = "checks[" + std::to_string(index) + "]";
    map_node(node, field);
    only_keys(node, field,
              {"type", "id", "criteria", "t", "s", "a", "b", "state", "value", "tolerance", "confidence", "alpha",
               "k", "count", "times", "from", "sharp"});
    Check c;
    c.type = text(required(node, "type", field), field + ".type");
    const auto rule = check_rules().find(c.type);
    if (rule == check_rules().end())
        parse_fail(node["type"], field + ".type",
                   "unknown check type '" + c.type + "' (supported: " + known_check_types() + ")");
    if (std::find(rule->second.modes.begin(), rule->second.modes.end(), mode) == rule->second.modes.end())
        invalid(node["type"], field + ".type",
                "check '" + c.type + "' does not apply to mode " + std::string(to_string(mode)));
    for (const auto key : rule->second.required) required(node, std::string(key), field);

    c.id = node["id"] ? text(node["id"], field + ".id") : c.type + "#" + std::to_string(index);
    auto num = [&](const char* key, double& dst) {
        if (node[key]) dst = number(node[key], field + "." + key);
    };
    num("t", c.t);
    num("s", c.s);
    num("a", c.a);
    num("b", c.b);
    num("tolerance", c.tolerance);
    num("confidence", c.confidence);
    num("alpha", c.alpha);
    if (node["value"]) c.value = number(node["value"], field + ".value");
    if (node["state"]) c.state = static_cast<int>(integer(node["state"], field + ".state"));
    if (node["k"]) c.k = static_cast<int>(integer(node["k"], field + ".k"));
    if (node["count"]) c.count = count(node["count"], field + ".count");
    if (node["times"]) c.times = numbers(node["times"], field + ".times");
    if (node["sharp"]) c.sharp = boolean(node["sharp"], field + ".sharp");
    if (node["from"]) {
        const YAML::Node from = node["from"];
        if (!from.IsSequence() || from.size() != 2) parse_fail(from, field + ".from", "expected [state, age]");
        c.alt_state = static_cast<int>(integer(from[0], field + ".from"));
        c.alt_age = number(from[1], field + ".from");
        if (!(c.alt_age >= 0.0)) invalid(from, field + ".from", "age must be >= 0");
    }
    if (node["criteria"]) {
        const YAML::Node cr = node["criteria"];
        if (!cr.IsSequence()) parse_fail(cr, field + ".criteria", "expected a list of criterion numbers");
        for (const auto& item : cr) c.criteria.push_back(static_cast<int>(integer(item, field + ".criteria")));
    }

    if (c.tolerance < 0.0) invalid(node["tolerance"], field + ".tolerance", "must be >= 0");
    if (!(c.confidence > 0.0 && c.confidence < 1.0))
        invalid(node["confidence"], field + ".confidence", "must lie in (0, 1)");
    if (c.t < 0.0 || c.s < 0.0 || c.a < 0.0 || c.b < 0.0) invalid(node, field, "probe values must be >= 0");
    if (c.type == "power-moment" && c.k < 3) invalid(node["k"], field + ".k", "must be >= 3");
    if (c.type == "exp-moment" && !(c.alpha > 0.0)) invalid(node["alpha"], field + ".alpha", "must be positive");
    if (c.type == "conditional-bound" && !(c.t > 0.0)) invalid(node["t"], field + ".t", "tau must be positive");
    if ((c.type == "mean-curve" || c.type == "underjump-curve")) {
        if (c.times.empty()) invalid(node["times"], field + ".times", "needs at least one time");
        if (!std::is_sorted(c.times.begin(), c.times.end()) || c.times.front() < 0.0)
            invalid(node["times"], field + ".times", "must be nonnegative and ascending");
    }
    return c;
}

Mode parse_mode(const YAML::Node& node) {
    const std::string m = text(node, "mode");
    if (m == "renewal") return Mode::Renewal;
    if (m == "linearwise") return Mode::Linearwise;
    if (m == "bounds") return Mode::Bounds;
    if (m == "key-renewal") return Mode::KeyRenewal;
    parse_fail(node, "mode", "unknown mode '" + m + "' (supported: renewal, linearwise, bounds, key-renewal)");
}

ChainSpec parse_chain(const YAML::Node& node) {
    map_node(node, "chain");
    only_keys(node, "chain", {"states", "matrix"});
    ChainSpec spec;
    const YAML::Node states = required(node, "states", "chain");
    if (!states.IsSequence()) parse_fail(states, "chain.states", "expected a list of integer labels");
    for (const auto& s : states) spec.states.push_back(static_cast<int>(integer(s, "chain.states")));
    const YAML::Node matrix = required(node, "matrix", "chain");
    if (!matrix.IsSequence()) parse_fail(matrix, "chain.matrix", "expected a list of rows");
    for (const auto& row : matrix) spec.matrix.push_back(numbers(row, "chain.matrix"));
    return spec;
}

void check_positive(const YAML::Node& node, std::string_view field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) invalid(node, field, "must be positive and finite");
}

Scenario parse_node(const YAML::Node& root, const std::filesystem::path& source) {
    if (!root.IsMap()) parse_fail(root, "<root>", "expected a mapping of scenario fields");
    only_keys(root, "scenario",
              {"name", "mode", "seed", "replicas", "grid_step", "t_max", "t_obs", "cycle", "kernel", "chain",
               "level_laws", "initial", "probes", "checks"});
    Scenario sc;
    sc.source = source;
    sc.name = root["name"] ? text(root["name"], "name") : source.stem().string();
    if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos)
        invalid(root["name"], "name", "must be a non-empty file-name-safe string");
    sc.mode = parse_mode(required(root, "mode", "scenario"));

    const long long seed = integer(required(root, "seed", "scenario"), "seed");
    if (seed < 0) invalid(root["seed"], "seed", "must be >= 0");
    sc.seed = static_cast<std::uint64_t>(seed);
    if (root["replicas"]) sc.replicas = count(root["replicas"], "replicas");
    if (root["grid_step"]) {
        sc.grid_step = number(root["grid_step"], "grid_step");
        check_positive(root["grid_step"], "grid_step", sc.grid_step);
    }
    if (root["t_max"]) {
        sc.t_max = number(root["t_max"], "t_max");
        check_positive(root["t_max"], "t_max", sc.t_max);
    }
    if (root["t_obs"]) {
        sc.t_obs = number(root["t_obs"], "t_obs");
        check_positive(root["t_obs"], "t_obs", sc.t_obs);
    }
    if (root["cycle"]) sc.cycle = parse_distribution(root["cycle"], "cycle");
    if (root["kernel"]) sc.kernel = parse_distribution(root["kernel"], "kernel");

    if (root["chain"]) {
        sc.chain = parse_chain(root["chain"]);
        const ChainSpec spec = *sc.chain;
        build(root["chain"], "chain", [&] { return EmbeddedChain(spec.states, spec.matrix); });
        const YAML::Node laws = required(root, "level_laws", "scenario");
        if (!laws.IsSequence()) parse_fail(laws, "level_laws", "expected a list of distributions");
        for (std::size_t i = 0; i < laws.size(); ++i)
            sc.level_laws.push_back(parse_distribution(laws[i], "level_laws[" + std::to_string(i) + "]"));
        const YAML::Node init = required(root, "initial", "scenario");
        if (!init.IsSequence() || init.size() != 2) parse_fail(init, "initial", "expected [state, age]");
        sc.initial_state = static_cast<int>(integer(init[0], "initial"));
        sc.initial_age = number(init[1], "initial");
        build(root["level_laws"], "level_laws", [&] { return sc.process(); });
    } else if (root["level_laws"] || root["initial"]) {
        parse_fail(root["level_laws"] ? root["level_laws"] : root["initial"], "chain", "level laws need a chain");
    }

    if (const YAML::Node probes = root["probes"]) {
        map_node(probes, "probes");
        only_keys(probes, "probes", {"s", "t", "a", "b"});
        if (probes["s"]) sc.probe_s = numbers(probes["s"], "probes.s");
        if (probes["t"]) sc.probe_t = numbers(probes["t"], "probes.t");
        if (probes["a"]) sc.probe_a = numbers(probes["a"], "probes.a");
        if (probes["b"]) sc.probe_b = numbers(probes["b"], "probes.b");
        for (const auto* list : {&sc.probe_s, &sc.probe_t, &sc.probe_a, &sc.probe_b})
            for (double v : *list)
                if (!(v >= 0.0)) invalid(probes, "probes", "probe values must be >= 0");
    }

    switch (sc.mode) {
        case Mode::Renewal:
        case Mode::KeyRenewal:
            if (!sc.cycle) parse_fail(root, "cycle", "missing (required by mode " + std::string(to_string(sc.mode)) + ")");
            if (sc.t_max <= 0.0) parse_fail(root, "t_max", "missing (required by mode " + std::string(to_string(sc.mode)) + ")");
            if (sc.mode == Mode::KeyRenewal && !sc.kernel) parse_fail(root, "kernel", "missing (required by mode key-renewal)");
            break;
        case Mode::Linearwise:
            if (!sc.chain) parse_fail(root, "chain", "missing (required by mode linearwise)");
            if (sc.t_obs <= 0.0) parse_fail(root, "t_obs", "missing (required by mode linearwise)");
            break;
        case Mode::Bounds:
            if (!sc.cycle && !sc.chain) parse_fail(root, "cycle", "bounds mode needs a cycle or a chain");
            break;
    }
    if (sc.cycle && sc.grid_step == 0.0) sc.grid_step = sc.cycle->mean() / 1000.0;
    if (sc.cycle && !std::isfinite(sc.cycle->mean())) invalid(root["cycle"], "cycle", "InfiniteMean: cycle law has no finite mean");

    if (const YAML::Node checks = root["checks"]) {
        if (!checks.IsSequence()) parse_fail(checks, "checks", "expected a list of checks");
        for (std::size_t i = 0; i < checks.size(); ++i) sc.checks.push_back(parse_check(checks[i], i, sc.mode));
    }
    std::set<std::string> ids;
    std::set<int> crit;
    for (const auto& c : sc.checks) {
        if (!ids.insert(c.id).second) invalid(root["checks"], "checks", "duplicate check id '" + c.id + "'");
        crit.insert(c.criteria.begin(), c.criteria.end());
        const bool needs_cycle = c.type == "mean-curve" || c.type == "underjump-curve" ||
                                 c.type == "monotonicity-gap" || c.type == "power-moment" || c.type == "exp-moment";
        if (needs_cycle && !sc.cycle) invalid(root["checks"], "checks", "check '" + c.id + "' needs a cycle law");
        if (c.type == "conditional-bound" && !sc.chain)
            invalid(root["checks"], "checks", "check '" + c.id + "' needs a chain");
        if (c.type == "renewal-poisson" && sc.cycle->kind() != DistributionKind::Exponential)
            invalid(root["checks"], "checks", "check '" + c.id + "' needs an exponential cycle");
        if (c.type == "degeneration" && sc.chain->states.size() != 1)
            invalid(root["checks"], "checks", "check '" + c.id + "' needs a single-state chain");
        const bool table_probe = c.type == "renewal-value" || c.type == "overjump-survival" || c.type == "key-renewal";
        if (table_probe && c.t > sc.t_max) invalid(root["checks"], "checks", "check '" + c.id + "' probes past t_max");
        if (c.type == "monotonicity-gap" && (sc.t_max <= 0.0 || c.t > sc.t_max))
            invalid(root["checks"], "checks", "check '" + c.id + "' needs t <= t_max");
    }
    sc.criteria.assign(crit.begin(), crit.end());
    return sc;
}

}  // namespace

Scenario parse_scenario(const std::string& content, const std::filesystem::path& source) {
    YAML::Node root;
    try {
        root = YAML::Load(content);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    try {
        return parse_node(root, source);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

}  // namespace lwp
