#pragma once

#include "lwp/dist.hpp"
#include "lwp/linearwise.hpp"
#include "lwp/parallel.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lwp {

enum class Mode { Renewal, Linearwise, Bounds, KeyRenewal };

std::string_view to_string(Mode mode) noexcept;

/// One in-scenario assertion. Only the fields its type reads are meaningful;
/// load_scenario rejects missing required fields.
struct Check {
    std::string type;
    std::string id;  // defaults to "<type>#<index>"
    std::vector<int> criteria;

    double t = 0.0;
    double s = 0.0;
    double a = 0.0;
    double b = 0.0;
    int state = 0;
    std::optional<double> value;
    double tolerance = 0.0;
    double confidence = 0.999;
    double alpha = 0.0;
    int k = 0;
    std::size_t count = 0;
    std::vector<double> times;
    std::optional<int> alt_state;
    double alt_age = 0.0;
    bool sharp = false;
};

struct ChainSpec {
    std::vector<int> states;
    std::vector<std::vector<double>> matrix;
};

/// Validated scenario. Distributions and the chain are built at load time so
/// every invariant violation surfaces from load_scenario.
struct Scenario {
    std::string name;
    std::filesystem::path source;
    Mode mode = Mode::Renewal;
    std::uint64_t seed = 1;
    std::size_t replicas = 100'000;
    double grid_step = 0.0;  // resolved to mean / 1000 when the file omits it
    double t_max = 0.0;
    double t_obs = 0.0;

    std::optional<Distribution> cycle;
    std::optional<Distribution> kernel;  // key-renewal: b is this law's survival function
    std::optional<ChainSpec> chain;
    std::vector<Distribution> level_laws;
    int initial_state = 0;
    double initial_age = 0.0;

    std::vector<double> probe_s;
    std::vector<double> probe_t;
    std::vector<double> probe_a;
    std::vector<double> probe_b;

    std::vector<Check> checks;
    std::vector<int> criteria;  // union of the checks' criteria

    [[nodiscard]] LinearwiseProcess process() const;
};

/// Throws ParseError (with line and field) or ValidationError.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& source = "<string>");

/// Command-line overrides applied on top of a loaded scenario.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::optional<std::size_t> replicas;
    std::optional<double> grid_step;
    /// When empty nothing is written.
    std::filesystem::path out_dir;
};

struct CheckResult {
    std::string id;
    std::string type;
    std::string provenance;
    std::vector<int> criteria;
    bool passed = false;
    std::string detail;
    /// Named numbers for the JSON summary, in insertion order.
    std::vector<std::pair<std::string, double>> values;
};

struct RunResult {
    std::string scenario;
    Mode mode = Mode::Renewal;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::vector<CheckResult> checks;
    /// Set when the scenario could not be evaluated at all (e.g. LatticeSupport).
    std::optional<std::string> error;
    std::vector<std::filesystem::path> files;

    [[nodiscard]] bool passed() const;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// Bundled scenarios shipped with the library, sorted by file name.
std::vector<std::filesystem::path> bundled_scenarios(const std::filesystem::path& dir = LWP_SCENARIO_DIR);

struct MatrixRow {
    int criterion = 0;  // 0 when the file could not be loaded
    std::string scenario;
    std::string check;
    bool passed = false;
    std::string detail;
};

struct VerifySummary {
    std::vector<MatrixRow> rows;
    [[nodiscard]] bool passed() const;
    /// Verdicts only, for comparing runs under different seeds or worker counts.
    [[nodiscard]] std::vector<std::string> verdicts() const;
};

VerifySummary verify_all(const RunOptions& options, const std::filesystem::path& dir = LWP_SCENARIO_DIR);

void print_matrix(const VerifySummary& summary, std::ostream& out);
void print_result(const RunResult& result, std::ostream& out);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace lwp
