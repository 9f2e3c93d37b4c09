#pragma once

// JSON run configuration for the muntzlab tool. Every violation is collected
// before reporting, so one pass over a broken config lists all its problems.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "muntz/errors.hpp"
#include "muntz/expand.hpp"
#include "muntz/hereditary.hpp"
#include "muntz/interval.hpp"
#include "muntz/operators.hpp"
#include "muntz/spaces.hpp"

namespace muntz::cli {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string>& stage_names()
{
    static const std::vector<std::string> names{"gram", "biorth", "bound-fit", "expand", "hereditary", "operator"};
    return names;
}

struct ExponentSpec
{
    enum class Kind { list, squares, geometric };
    Kind kind = Kind::list;
    std::vector<std::string> values; // resolved decimal strings
    std::string q, r;                // geometric parameters
    std::size_t n = 0;
};

struct RunConfig
{
    ExponentSpec exponents;
    std::string a = "0", b = "1";
    PrecisionConfig precision;
    std::string delta = "0.5";
    bool shift_weights = true;
    std::vector<std::pair<std::string, std::string>> weights; // (re, im) when not shift
    bool exhaustive_partitions = true;
    std::size_t partition_sample = 0;
    std::uint64_t partition_seed = 0;
    std::vector<std::string> commands;
    std::string output_dir = "muntzlab-out";
    std::vector<std::string> epsilons; // empty: {0.05, 0.1, 0.2} (b - a)
    std::vector<std::string> functions{"t"};
    std::uint64_t seed = 1;
    std::size_t samples = 50;
    Json source; // the config as given
};

namespace detail {

class Violations
{
  public:
    void add(std::string msg) { list_.push_back(std::move(msg)); }
    bool empty() const { return list_.empty(); }
    const std::vector<std::string>& list() const { return list_; }

  private:
    std::vector<std::string> list_;
};

inline bool decimal_string(const Json& v, const std::string& where, Violations& out, std::string& dest)
{
    if (!v.is_string()) {
        out.add(where + ": expected a decimal string");
        return false;
    }
    const auto s = v.get<std::string>();
    if (!Scalar::is_decimal_literal(s)) {
        out.add(where + ": '" + s + "' is not a decimal number");
        return false;
    }
    dest = s;
    return true;
}

inline bool unsigned_integer(const Json& v, const std::string& where, Violations& out, std::uint64_t& dest)
{
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        out.add(where + ": expected a non-negative integer");
        return false;
    }
    dest = v.get<std::uint64_t>();
    return true;
}

inline void reject_unknown(const Json& obj, const std::set<std::string>& known, const std::string& where,
                           Violations& out)
{
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            out.add(where + "unknown key '" + it.key() + "'");
}

inline void parse_exponents(const Json& v, RunConfig& cfg, Violations& out)
{
    auto& spec = cfg.exponents;
    if (v.is_array()) {
        spec.kind = ExponentSpec::Kind::list;
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::string s;
            if (decimal_string(v[i], "exponents[" + std::to_string(i) + "]", out, s))
                spec.values.push_back(s);
        }
        if (v.empty())
            out.add("exponents: list is empty");
        return;
    }
    if (!v.is_object()) {
        out.add("exponents: expected a list of decimal strings or a family descriptor");
        return;
    }
    reject_unknown(v, {"kind", "N", "params"}, "exponents: ", out);
    std::uint64_t n = 0;
    if (!v.contains("N"))
        out.add("exponents: missing 'N'");
    else if (unsigned_integer(v["N"], "exponents.N", out, n) && n == 0)
        out.add("exponents.N: must be positive");
    spec.n = n;
    const std::string kind = v.contains("kind") && v["kind"].is_string() ? v["kind"].get<std::string>() : "";
    const Json params = v.value("params", Json::object());
    if (!params.is_object()) {
        out.add("exponents.params: expected an object");
        return;
    }
    if (kind == "n^2") {
        spec.kind = ExponentSpec::Kind::squares;
        reject_unknown(params, {}, "exponents.params: ", out);
        if (n > 0)
            spec.values = squares_family(n);
    } else if (kind == "geometric") {
        spec.kind = ExponentSpec::Kind::geometric;
        reject_unknown(params, {"q", "r"}, "exponents.params: ", out);
        bool ok = true;
        for (const char* key : {"q", "r"}) {
            if (!params.contains(key)) {
                out.add(std::string("exponents.params: missing '") + key + "'");
                ok = false;
            }
        }
        ok = ok && decimal_string(params["q"], "exponents.params.q", out, spec.q);
        ok = ok && decimal_string(params["r"], "exponents.params.r", out, spec.r);
        if (ok && n > 0) {
            try {
                spec.values = geometric_family(spec.q, spec.r, n);
            } catch (const Error& e) {
                out.add(std::string("exponents: ") + e.what());
            }
        }
    } else {
        out.add("exponents.kind: expected \"n^2\" or \"geometric\"");
    }
}

inline void parse_weights(const Json& v, RunConfig& cfg, Violations& out)
{
    if (v.is_string() && v.get<std::string>() == "shift") {
        cfg.shift_weights = true;
        return;
    }
    if (!v.is_array()) {
        out.add("weights: expected \"shift\" or a list");
        return;
    }
    cfg.shift_weights = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string where = "weights[" + std::to_string(i) + "]";
        std::string re = "0", im = "0";
        if (v[i].is_array()) {
            if (v[i].size() != 2) {
                out.add(where + ": expected [re, im]");
                continue;
            }
            const bool ok_re = decimal_string(v[i][0], where + "[0]", out, re);
            const bool ok_im = decimal_string(v[i][1], where + "[1]", out, im);
            if (!(ok_re && ok_im))
                continue;
        } else if (!decimal_string(v[i], where, out, re)) {
            continue;
        }
        cfg.weights.emplace_back(re, im);
    }
}

inline void parse_partitions(const Json& v, RunConfig& cfg, Violations& out)
{
    if (v.is_string() && v.get<std::string>() == "exhaustive") {
        cfg.exhaustive_partitions = true;
        return;
    }
    if (!v.is_object()) {
        out.add("partitions: expected \"exhaustive\" or {\"sample\": count, \"seed\": seed}");
        return;
    }
    cfg.exhaustive_partitions = false;
    reject_unknown(v, {"sample", "seed"}, "partitions: ", out);
    std::uint64_t count = 0;
    if (!v.contains("sample"))
        out.add("partitions: missing 'sample'");
    else if (unsigned_integer(v["sample"], "partitions.sample", out, count) && count == 0)
        out.add("partitions.sample: must be positive");
    cfg.partition_sample = count;
    if (v.contains("seed"))
        unsigned_integer(v["seed"], "partitions.seed", out, cfg.partition_seed);
}

// Semantic checks that need numbers: exponent validity, interval order,
// weight bounds, epsilon range.
inline void check_values(RunConfig& cfg, Violations& out)
{
    PrecisionScope scope(std::max<long>(cfg.precision.mantissa_bits, 128));
    std::optional<ExponentSequence> exps;
    if (!cfg.exponents.values.empty()) {
        try {
            exps = validate_exponents(cfg.exponents.values);
        } catch (const Error& e) {
            out.add(std::string("exponents: ") + e.what());
        }
    }
    std::optional<Interval> iv;
    try {
        iv.emplace(cfg.a, cfg.b);
    } catch (const Error& e) {
        out.add(std::string("interval: ") + e.what());
    }
    if (!Scalar::is_decimal_literal(cfg.delta) || !(Scalar::parse(cfg.delta) > Scalar(0)))
        out.add("delta: must be a positive decimal");
    else if (exps) {
        try {
            WeightSpec spec;
            if (!cfg.shift_weights) {
                ComplexVector u;
                for (const auto& [re, im] : cfg.weights)
                    u.emplace_back(Scalar::parse(re), Scalar::parse(im));
                spec = WeightSpec::custom_weights(std::move(u));
            }
            (void)make_weights(Scalar::parse(cfg.delta), *exps, spec);
        } catch (const Error& e) {
            out.add(std::string("weights: ") + e.what());
        }
    }
    if (iv) {
        for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
            const Scalar e = Scalar::parse(cfg.epsilons[i]);
            if (!(e > Scalar(0)) || !(e < iv->length()))
                out.add("epsilons[" + std::to_string(i) + "]: must lie in (0, b - a)");
        }
    }
    const bool wants_hereditary =
        std::find(cfg.commands.begin(), cfg.commands.end(), "hereditary") != cfg.commands.end();
    if (wants_hereditary && cfg.exhaustive_partitions && exps && exps->size() > kMaxExhaustiveSize)
        out.add("partitions: exhaustive sweep needs N <= " + std::to_string(kMaxExhaustiveSize) +
                ", use {\"sample\": count, \"seed\": seed}");
    if (exps && exps->size() > 63)
        out.add("exponents: at most 63 exponents are supported");
}

} // namespace detail

inline RunConfig parse_config(const Json& root)
{
    detail::Violations out;
    RunConfig cfg;
    cfg.source = root;
    if (!root.is_object())
        throw ConfigError({"config: top level must be a JSON object"});

    detail::reject_unknown(root,
                           {"exponents", "interval", "precision", "escalation_limit", "delta", "weights",
                            "partitions", "commands", "output_dir", "epsilons", "functions", "seed", "samples"},
                           "", out);

    if (!root.contains("exponents"))
        out.add("missing required key 'exponents'");
    else
        detail::parse_exponents(root["exponents"], cfg, out);

    if (!root.contains("interval")) {
        out.add("missing required key 'interval'");
    } else if (!root["interval"].is_object()) {
        out.add("interval: expected {\"a\": decimal, \"b\": decimal}");
    } else {
        const Json& iv = root["interval"];
        detail::reject_unknown(iv, {"a", "b"}, "interval: ", out);
        if (!iv.contains("a") || !iv.contains("b"))
            out.add("interval: both 'a' and 'b' are required");
        if (iv.contains("a"))
            detail::decimal_string(iv["a"], "interval.a", out, cfg.a);
        if (iv.contains("b"))
            detail::decimal_string(iv["b"], "interval.b", out, cfg.b);
    }

    std::uint64_t value = 0;
    if (root.contains("precision") && detail::unsigned_integer(root["precision"], "precision", out, value))
        cfg.precision.mantissa_bits = static_cast<long>(value);
    cfg.precision.escalation_limit = std::max<long>(4096, cfg.precision.mantissa_bits);
    if (root.contains("escalation_limit") &&
        detail::unsigned_integer(root["escalation_limit"], "escalation_limit", out, value))
        cfg.precision.escalation_limit = static_cast<long>(value);
    if (cfg.precision.mantissa_bits < 128)
        out.add("precision: must be at least 128 bits");
    if (cfg.precision.escalation_limit < cfg.precision.mantissa_bits)
        out.add("escalation_limit: must be at least the precision");

    if (root.contains("delta"))
        detail::decimal_string(root["delta"], "delta", out, cfg.delta);
    if (root.contains("weights"))
        detail::parse_weights(root["weights"], cfg, out);
    if (root.contains("partitions"))
        detail::parse_partitions(root["partitions"], cfg, out);

    if (!root.contains("commands")) {
        out.add("missing required key 'commands'");
    } else if (!root["commands"].is_array() || root["commands"].empty()) {
        out.add("commands: expected a non-empty list of stage names");
    } else {
        for (const auto& c : root["commands"]) {
            if (!c.is_string()) {
                out.add("commands: stage names must be strings");
                continue;
            }
            const auto name = c.get<std::string>();
            const auto& known = stage_names();
            if (std::find(known.begin(), known.end(), name) == known.end())
                out.add("commands: unknown stage '" + name + "'");
            else if (std::find(cfg.commands.begin(), cfg.commands.end(), name) != cfg.commands.end())
                out.add("commands: stage '" + name + "' listed twice");
            else
                cfg.commands.push_back(name);
        }
    }

    if (root.contains("output_dir")) {
        if (root["output_dir"].is_string() && !root["output_dir"].get<std::string>().empty())
            cfg.output_dir = root["output_dir"].get<std::string>();
        else
            out.add("output_dir: expected a non-empty path string");
    }
    if (root.contains("epsilons")) {
        if (!root["epsilons"].is_array() || root["epsilons"].empty()) {
            out.add("epsilons: expected a non-empty list of decimal strings");
        } else {
            for (std::size_t i = 0; i < root["epsilons"].size(); ++i) {
                std::string s;
                if (detail::decimal_string(root["epsilons"][i], "epsilons[" + std::to_string(i) + "]", out, s))
                    cfg.epsilons.push_back(s);
            }
        }
    }
    if (root.contains("functions")) {
        cfg.functions.clear();
        if (!root["functions"].is_array()) {
            out.add("functions: expected a list of built-in function names");
        } else {
            for (const auto& f : root["functions"]) {
                try {
                    if (!f.is_string())
                        throw UsageError("function names must be strings");
                    cfg.functions.push_back(ExternalFunction::parse(f.get<std::string>()).name());
                } catch (const Error& e) {
                    out.add(std::string("functions: ") + e.what());
                }
            }
        }
    }
    if (root.contains("seed"))
        detail::unsigned_integer(root["seed"], "seed", out, cfg.seed);
    if (root.contains("samples")) {
        std::uint64_t s = 0;
        if (detail::unsigned_integer(root["samples"], "samples", out, s) && s == 0)
            out.add("samples: must be positive");
        cfg.samples = s;
    }

    if (cfg.precision.mantissa_bits >= 128)
        detail::check_values(cfg, out);
    if (!out.empty())
        throw ConfigError(out.list());
    return cfg;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({"cannot open config file '" + path + "'"});
    std::stringstream text;
    text << in.rdbuf();
    Json root;
    try {
        root = Json::parse(text.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
    }
    return parse_config(root);
}

} // namespace muntz::cli
