#pragma once

// Synthetic equation dataset: generation, z-score standardization and CSV I/O.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ldist/equation.hpp"
#include "ldist/error.hpp"
#include "ldist/random.hpp"
#include "ldist/trace.hpp"

namespace ldist {

inline constexpr std::size_t kNumFeatures = 4;
using Features = std::array<double, kNumFeatures>;

struct DataConfig {
    std::size_t n_train = 70'000;
    std::size_t n_test = 10'000;
    double interval_lo = -5.0;
    double interval_hi = 5.0;
    std::uint64_t seed = 42;
    std::vector<std::string> equations{kDefaultEquationTexts.begin(), kDefaultEquationTexts.end()};

    void validate() const {
        if (!std::isfinite(interval_lo) || !std::isfinite(interval_hi) || !(interval_lo < interval_hi))
            throw ValidationError("sample interval requires finite lo < hi");
        if (n_train < 1) throw ValidationError("n_train must be >= 1");
        if (n_test < 1) throw ValidationError("n_test must be >= 1");
        (void)parse_equation_set(equations);
    }
};

inline DataConfig data_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("data config must be a JSON object");
    DataConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "n_train") cfg.n_train = value.get<std::size_t>();
            else if (key == "n_test") cfg.n_test = value.get<std::size_t>();
            else if (key == "interval_lo") cfg.interval_lo = value.get<double>();
            else if (key == "interval_hi") cfg.interval_hi = value.get<double>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "equations") cfg.equations = value.get<std::vector<std::string>>();
            else throw ValidationError("unknown data config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("data config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::json to_json(const DataConfig& cfg) {
    return {{"n_train", cfg.n_train},         {"n_test", cfg.n_test},
            {"interval_lo", cfg.interval_lo}, {"interval_hi", cfg.interval_hi},
            {"seed", cfg.seed},               {"equations", cfg.equations}};
}

struct Instance {
    double a = 0, b = 0, c = 0;
    double result = 0;
    Label label = 0;

    Features features() const { return {a, b, c, result}; }
    friend bool operator==(const Instance&, const Instance&) = default;
};

struct Dataset {
    std::vector<Instance> train;
    std::vector<Instance> test;
};

/// One sequential stream: for each instance, label first, then a, b, c.
/// Training instances are drawn before test instances.
inline Dataset generate(const DataConfig& cfg) {
    cfg.validate();
    const EquationSet eqs = parse_equation_set(cfg.equations);
    Rng rng(derive_seed(cfg.seed, SeedRole::Data));
    auto draw = [&] {
        Instance x;
        x.label = static_cast<Label>(rng.below(kNumEquations));
        x.a = rng.uniform(cfg.interval_lo, cfg.interval_hi);
        x.b = rng.uniform(cfg.interval_lo, cfg.interval_hi);
        x.c = rng.uniform(cfg.interval_lo, cfg.interval_hi);
        x.result = evaluate_equation(eqs, x.label, x.a, x.b, x.c);
        return x;
    };
    Dataset ds;
    ds.train.reserve(cfg.n_train);
    ds.test.reserve(cfg.n_test);
    for (std::size_t i = 0; i < cfg.n_train; ++i) ds.train.push_back(draw());
    for (std::size_t i = 0; i < cfg.n_test; ++i) ds.test.push_back(draw());
    return ds;
}

struct Standardizer {
    Features mean{};
    Features stddev{};

    Features apply(const Features& x) const {
        Features z;
        for (std::size_t f = 0; f < kNumFeatures; ++f) z[f] = (x[f] - mean[f]) / stddev[f];
        return z;
    }
};

/// Population mean / standard deviation over the training split.
inline Standardizer fit_standardizer(const std::vector<Instance>& train) {
    if (train.empty()) throw ValidationError("cannot fit a standardizer on an empty split");
    Standardizer s;
    const double n = static_cast<double>(train.size());
    for (const auto& x : train) {
        const auto f = x.features();
        for (std::size_t j = 0; j < kNumFeatures; ++j) s.mean[j] += f[j];
    }
    for (auto& m : s.mean) m /= n;
    Features var{};
    for (const auto& x : train) {
        const auto f = x.features();
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
            const double d = f[j] - s.mean[j];
            var[j] += d * d;
        }
    }
    static constexpr std::array<const char*, kNumFeatures> names{"a", "b", "c", "result"};
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        s.stddev[j] = std::sqrt(var[j] / n);
        if (!(s.stddev[j] > 0.0))
            throw ValidationError(std::string("feature '") + names[j] + "' has zero variance");
    }
    return s;
}

inline Features standardize(const Standardizer& s, const Instance& x) { return s.apply(x.features()); }

inline std::vector<Features> standardize_all(const Standardizer& s, const std::vector<Instance>& xs) {
    std::vector<Features> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(standardize(s, x));
    return out;
}

inline std::vector<Label> labels_of(const std::vector<Instance>& xs) {
    std::vector<Label> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(x.label);
    return out;
}

// ---- CSV ------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "a,b,c,result,label";

/// Shortest round-trippable text at 17 significant digits.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                         std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

inline void write_csv(const std::vector<Instance>& xs, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& x : xs) {
        out << format_double(x.a) << ',' << format_double(x.b) << ',' << format_double(x.c) << ','
            << format_double(x.result) << ',' << x.label << '\n';
    }
}

inline void write_csv(const std::vector<Instance>& xs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_csv(xs, out);
    if (!out) throw IoError("write failed: " + path.string());
}

namespace detail {

inline double parse_double_field(std::string_view field, std::size_t line) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty() || !std::isfinite(v))
        throw FormatError("line " + std::to_string(line) + ": non-numeric field '" +
                          std::string(field) + "'");
    return v;
}

}  // namespace detail

inline std::vector<Instance> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty CSV: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw FormatError("missing CSV header 'a,b,c,result,label'");

    std::vector<Instance> xs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string_view, 5> fields;
        std::string_view rest = line;
        for (std::size_t f = 0; f < 5; ++f) {
            const auto comma = rest.find(',');
            if ((comma == std::string_view::npos) != (f == 4))
                throw FormatError("line " + std::to_string(lineno) + ": expected 5 fields");
            fields[f] = rest.substr(0, comma);
            if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
        }
        Instance x;
        x.a = detail::parse_double_field(fields[0], lineno);
        x.b = detail::parse_double_field(fields[1], lineno);
        x.c = detail::parse_double_field(fields[2], lineno);
        x.result = detail::parse_double_field(fields[3], lineno);
        unsigned long long label = 0;
        const auto [ptr, ec] =
            std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), label);
        if (ec != std::errc() || ptr != fields[4].data() + fields[4].size() || fields[4].empty())
            throw FormatError("line " + std::to_string(lineno) + ": non-numeric label");
        if (label >= kNumEquations)
            throw FormatError("line " + std::to_string(lineno) + ": label " + std::to_string(label) +
                              " out of range [0,6]");
        x.label = static_cast<Label>(label);
        xs.push_back(x);
    }
    return xs;
}

inline std::vector<Instance> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_csv(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace ldist
