#include "stochexp/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "stochexp/criteria.hpp"
#include "stochexp/exponentials.hpp"
#include "stochexp/text.hpp"

namespace stochexp {

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

namespace {

const std::vector<std::string> kProcesses = {"bm", "scaled_bm", "controlled", "bes3_inverse",
                                             "stopped_bm"};
const std::vector<std::string> kCriteria = {"novikov",  "kazamaki", "mixed",          "theorem1",
                                            "theorem2", "ruf",      "supermartingale"};

std::uint64_t parse_unsigned(std::string_view text, const std::string& field) {
    text = trim(text);
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ConfigError(field, "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

double parse_number(std::string_view text, const std::string& field) {
    try {
        return parse_real(text, field);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, "expected a number, got '" + std::string(trim(text)) + "'");
    }
}

std::vector<double> parse_list(std::string_view text, const std::string& field) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        out.push_back(parse_number(item, field));
    }
    return out;
}

template <class Fn>
auto wrap(const std::string& field, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

PredictableControl parse_control(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("control '" + std::string(text) + "': expected KIND:VALUE");
    }
    const auto kind = text.substr(0, colon);
    const auto rest = text.substr(colon + 1);
    if (kind == "constant") {
        return PredictableControl::constant(parse_real(rest, "constant control"));
    }
    if (kind == "time") {
        std::vector<double> breaks;
        std::vector<double> values;
        for (const auto& knot : split(rest, ';')) {
            const auto tv = split(knot, '/');
            if (tv.size() != 2) {
                throw std::invalid_argument("time control knot '" + knot + "': expected T/A");
            }
            breaks.push_back(parse_real(tv[0], "time control break"));
            values.push_back(parse_real(tv[1], "time control value"));
        }
        return PredictableControl::of_time(std::move(breaks), std::move(values));
    }
    if (kind == "qv") return PredictableControl::of_qv(FunctionSpec::parse(rest));
    if (kind == "state") return PredictableControl::of_state(FunctionSpec::parse(rest));
    if (kind == "necessity") return necessity_control(FunctionSpec::parse(rest));
    throw std::invalid_argument("unknown control kind '" + std::string(kind) + "'");
}

StoppingRule parse_stop(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("stop '" + std::string(text) + "': expected KIND:PARAM");
    }
    return {parse_stop_kind(text.substr(0, colon)), parse_real(text.substr(colon + 1), "stop")};
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected key=value");
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (!kv.emplace(key, value).second) {
            throw ConfigError(key, "duplicate key");
        }
    }

    ExperimentConfig c;
    std::set<std::string> used;
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        used.insert(key);
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    auto require = [&](const std::string& key) {
        auto v = get(key);
        if (!v || v->empty()) throw ConfigError(key, "missing required key");
        return *v;
    };

    if (auto v = get("experiment")) c.experiment = *v;
    c.process = require("process");
    if (std::find(kProcesses.begin(), kProcesses.end(), c.process) == kProcesses.end()) {
        throw ConfigError("process", "unknown process '" + c.process + "'");
    }
    if (auto v = get("process.sigma")) c.sigma = parse_number(*v, "process.sigma");
    if (auto v = get("process.r0")) {
        c.r0 = parse_number(*v, "process.r0");
        if (!(c.r0 > 0.0)) throw ConfigError("process.r0", "must be > 0");
    }
    if (auto v = get("process.control")) {
        c.process_control = wrap("process.control", [&] { return parse_control(*v); });
    }
    if (auto v = get("process.stop")) {
        c.process_stop = wrap("process.stop", [&] { return parse_stop(*v); });
    }
    if (c.process == "controlled" && !c.process_control) {
        throw ConfigError("process.control", "missing required key for controlled process");
    }
    if (c.process == "stopped_bm" && !c.process_stop) {
        throw ConfigError("process.stop", "missing required key for stopped_bm");
    }

    c.criterion = require("criterion");
    if (std::find(kCriteria.begin(), kCriteria.end(), c.criterion) == kCriteria.end()) {
        throw ConfigError("criterion", "unknown criterion '" + c.criterion + "'");
    }
    if (auto v = get("criterion.a")) c.a = parse_number(*v, "criterion.a");
    if (auto v = get("criterion.control")) {
        c.control = wrap("criterion.control", [&] { return parse_control(*v); });
    }
    if (auto v = get("criterion.epsilon")) c.epsilon = parse_number(*v, "criterion.epsilon");
    if (auto v = get("criterion.phi")) {
        c.phi = wrap("criterion.phi", [&] { return LowerFunctionSpec::parse(*v); });
    }
    if (auto v = get("criterion.f")) {
        c.f = wrap("criterion.f", [&] { return FunctionSpec::parse(*v); });
    }
    if (auto v = get("criterion.h")) {
        c.h = wrap("criterion.h", [&] { return FunctionSpec::parse(*v); });
    }
    if (c.criterion == "mixed" && !kv.count("criterion.a")) {
        throw ConfigError("criterion.a", "missing required key for mixed");
    }
    if ((c.criterion == "theorem1" || c.criterion == "theorem2") && !c.control) {
        throw ConfigError("criterion.control", "missing required key for " + c.criterion);
    }
    if (c.criterion == "theorem2") {
        if (!kv.count("criterion.epsilon")) {
            throw ConfigError("criterion.epsilon", "missing required key for theorem2");
        }
        if (!(c.epsilon > 0.0)) throw ConfigError("criterion.epsilon", "must be > 0");
        if (!c.phi) c.phi = LowerFunctionSpec::zero();
        if (!c.f) throw ConfigError("criterion.f", "missing required key for theorem2");
    }
    if (c.criterion == "ruf" && !c.h) {
        throw ConfigError("criterion.h", "missing required key for ruf");
    }

    if (auto v = get("stops.deterministic")) c.stops_deterministic = parse_list(*v, "stops.deterministic");
    if (auto v = get("stops.qv_level")) c.stops_qv_level = parse_list(*v, "stops.qv_level");
    if (auto v = get("stops.abs_m_level")) c.stops_abs_m_level = parse_list(*v, "stops.abs_m_level");
    if (c.stops_deterministic.empty() && c.stops_qv_level.empty() && c.stops_abs_m_level.empty()) {
        throw ConfigError("stops", "at least one of stops.deterministic, stops.qv_level, "
                                   "stops.abs_m_level is required");
    }

    c.n_paths = parse_unsigned(require("n_paths"), "n_paths");
    if (c.n_paths < 2) throw ConfigError("n_paths", "must be >= 2");
    c.n_steps = parse_unsigned(require("n_steps"), "n_steps");
    if (c.n_steps < 1) throw ConfigError("n_steps", "must be >= 1");
    c.t_end = parse_number(require("t_end"), "t_end");
    if (!(c.t_end > 0.0)) throw ConfigError("t_end", "must be > 0");
    if (auto v = get("seed")) c.seed = parse_unsigned(*v, "seed");
    if (auto v = get("workers")) {
        const auto w = parse_unsigned(*v, "workers");
        if (w < 1 || w > 1024) throw ConfigError("workers", "must be in [1, 1024]");
        c.workers = static_cast<unsigned>(w);
    }
    c.output = get("output").value_or(c.experiment + ".csv");

    for (const auto& [key, value] : kv) {
        if (!used.count(key)) {
            throw ConfigError(key, "unknown key");
        }
    }
    return c;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    return parse(in);
}

ProcessSpec ExperimentConfig::process_spec() const {
    auto grid = make_time_grid(t_end, static_cast<long long>(n_steps));
    if (process == "bm") return ProcessSpec::bm(grid);
    if (process == "scaled_bm") return ProcessSpec::scaled_bm(grid, sigma);
    if (process == "controlled") return ProcessSpec::controlled(grid, *process_control);
    if (process == "bes3_inverse") return ProcessSpec::bes3_inverse(grid, r0);
    if (process == "stopped_bm") return ProcessSpec::stopped_bm(grid, *process_stop);
    throw ConfigError("process", "unknown process '" + process + "'");
}

std::vector<StoppingRule> ExperimentConfig::stops(const TimeGrid& grid) const {
    std::vector<StoppingRule> out;
    auto add = [&](StoppingRule::Kind kind, const std::vector<double>& params, const char* field) {
        if (params.empty()) return;
        auto family = wrap(field, [&] { return build_stop_family(kind, params, grid); });
        out.insert(out.end(), family.begin(), family.end());
    };
    add(StoppingRule::Kind::deterministic, stops_deterministic, "stops.deterministic");
    add(StoppingRule::Kind::qv_level, stops_qv_level, "stops.qv_level");
    add(StoppingRule::Kind::abs_m_level, stops_abs_m_level, "stops.abs_m_level");
    return out;
}

std::string ExperimentConfig::criterion_description() const {
    if (criterion == "mixed") return "mixed(a=" + format_real(a) + ")";
    if (criterion == "theorem1") return "theorem1(control=" + control->describe() + ")";
    if (criterion == "theorem2") {
        return "theorem2(control=" + control->describe() + ";epsilon=" + format_real(epsilon) +
               ";phi=" + phi->describe() + ";f=" + f->describe() + ")";
    }
    if (criterion == "ruf") return "ruf(h=" + h->describe() + ")";
    return criterion;
}

ExperimentOutcome execute_experiment(const ExperimentConfig& config) {
    const ProcessSpec process = wrap("process", [&] { return config.process_spec(); });
    const auto stops = config.stops(*process.grid);
    const McConfig mc{config.n_paths, config.seed, config.workers};

    CriterionReport report;
    const std::string& c = config.criterion;
    if (c == "novikov") {
        report = novikov_functional(process, stops, mc);
    } else if (c == "kazamaki") {
        report = kazamaki_functional(process, stops, mc);
    } else if (c == "mixed") {
        report = mixed_nk_functional(process, config.a, stops, mc);
    } else if (c == "theorem1") {
        report = theorem1_functional(process, *config.control, stops, mc);
    } else if (c == "theorem2") {
        report = wrap("criterion", [&] {
            return theorem2_functional(process, *config.control, config.epsilon, *config.phi,
                                       *config.f, stops, mc);
        });
    } else if (c == "ruf") {
        report = ruf_functional(process, *config.h, stops, mc);
    } else if (c == "supermartingale") {
        report = supermartingale_check(process, stops, mc);
    } else {
        throw ConfigError("criterion", "unknown criterion '" + c + "'");
    }

    ExperimentOutcome out;
    std::ostringstream csv;
    csv << kCsvHeader << '\n';
    const std::string process_text = csv_field(process.describe());
    const std::string criterion_text = csv_field(config.criterion_description());
    for (const auto& s : report.per_stop) {
        const auto& e = s.estimate;
        csv << csv_field(config.experiment) << ',' << process_text << ',' << criterion_text << ','
            << s.rule.kind_name() << ',' << format_real(s.rule.param) << ','
            << format_real(e.mean) << ',' << format_real(e.std_error) << ','
            << format_real(e.ci95.first) << ',' << format_real(e.ci95.second) << ','
            << config.n_paths << ',' << config.n_steps << ',' << format_real(config.t_end) << ','
            << config.seed << ',' << e.nonfinite_count << ',' << format_real(e.max_sample) << '\n';
        if (e.nonfinite_count > 0) {
            out.exit_code = 3;
        }
    }
    out.csv = csv.str();
    out.report = std::move(report);
    return out;
}

int run_experiment(const ExperimentConfig& config, std::ostream& summary) {
    ExperimentOutcome outcome = execute_experiment(config);
    {
        std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw ConfigError("output", "cannot write '" + config.output + "'");
        }
        file << outcome.csv;
    }

    const auto& r = outcome.report;
    summary << "experiment " << config.experiment << ": " << config.criterion_description()
            << " on " << config.process_spec().describe() << '\n';
    summary << "  n_paths=" << config.n_paths << " n_steps=" << config.n_steps
            << " t_end=" << format_real(config.t_end) << " seed=" << config.seed << '\n';
    for (const auto& s : r.per_stop) {
        const auto& e = s.estimate;
        summary << "  " << s.rule.describe() << ": mean " << format_real(e.mean) << " +- "
                << format_real(e.std_error) << " (95% CI " << format_real(e.ci95.first) << " .. "
                << format_real(e.ci95.second) << ")";
        if (s.heavy_tail) summary << " [heavy tail]";
        if (e.nonfinite_count > 0) summary << " [" << e.nonfinite_count << " non-finite]";
        summary << '\n';
    }
    summary << "  sup over stops (lower bound for the sup over all stopping times): "
            << format_real(r.sup_estimate) << '\n';
    if (r.stability_flag) {
        summary << "  warning: unstable estimate (heavy tail or non-finite samples)\n";
    }
    for (const auto& a : r.advisories) {
        summary << "  note: " << a << '\n';
    }
    summary << "  wrote " << config.output << '\n';
    return outcome.exit_code;
}

std::string list_catalog() {
    std::ostringstream out;
    out << "processes:\n"
        << "  bm               standard Brownian motion, <M>_t = t\n"
        << "  scaled_bm        sigma * B (process.sigma)\n"
        << "  controlled       int a dB (process.control)\n"
        << "  bes3_inverse     r0 / |BES(3)|, strict local martingale (process.r0)\n"
        << "  stopped_bm       B frozen at a stopping rule (process.stop)\n"
        << "criteria:\n"
        << "  novikov          E exp(<M>_tau / 2)\n"
        << "  kazamaki         E exp(M_tau / 2)\n"
        << "  mixed            E exp(a M_tau + (1/2 - a) <M>_tau) (criterion.a)\n"
        << "  theorem1         E exp(int a dM + int (1/2 - a) d<M>) (criterion.control)\n"
        << "  theorem2         theorem1 - eps phi(far QV) + f(near QV)\n"
        << "                   (criterion.control, criterion.epsilon, criterion.phi, criterion.f)\n"
        << "  ruf              E E_tau(M) exp(h(<M>_tau)) (criterion.h)\n"
        << "  supermartingale  E E_tau(M)\n"
        << "lower functions:\n"
        << "  zero | c_sqrt:C | lil | scaled:EPS:<inner>\n"
        << "stopping kinds:\n"
        << "  deterministic    first grid time >= t\n"
        << "  qv_level         first time <M> >= L\n"
        << "  abs_m_level      first time |M| >= L\n"
        << "functions:\n"
        << "  constant:C | power:P[:SCALE[:OFFSET]] | exp:RATE | log | linear:X/Y;... | "
           "step:X/Y;...\n"
        << "controls:\n"
        << "  constant:A | time:T/A;... | qv:<function> | state:<function> | "
           "necessity:<function>\n";
    return out.str();
}

}  // namespace stochexp
