#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "alphahyper/mc.hpp"
#include "alphahyper/morse.hpp"
#include "alphahyper/vswap.hpp"

namespace alphahyper::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    double x = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
        throw ConfigError("field '" + key + "': expected a number, got '" + t + "'");
    return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    std::int64_t x = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
        throw ConfigError("field '" + key + "': expected an integer, got '" + t + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "1" || t == "true" || t == "yes") return true;
    if (t == "0" || t == "false" || t == "no") return false;
    throw ConfigError("field '" + key + "': expected true/false, got '" + t + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("field '" + key + "': empty list");
    return out;
}

std::string num(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

// A table with optional cells; absent cells are empty in CSV and omitted in JSON.
using Cell = std::variant<std::monostate, double, std::string, bool>;

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::map<std::string, Cell> metadata;
    std::vector<std::string> warnings;
};

std::string cell_text(const Cell& c) {
    if (std::holds_alternative<double>(c)) return num(std::get<double>(c));
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "true" : "false";
    return {};
}

nlohmann::json cell_json(const Cell& c) {
    if (std::holds_alternative<double>(c)) return std::get<double>(c);
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c);
    return nullptr;
}

Cell verdict(bool ok) { return std::string(ok ? "pass" : "fail"); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::string render(const Table& t, Format f) {
    if (f == Format::Json) {
        nlohmann::json j;
        j["command"] = t.command;
        nlohmann::json meta = nlohmann::json::object();
        for (const auto& [k, v] : t.metadata) meta[k] = cell_json(v);
        j["metadata"] = meta;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : t.rows) {
            nlohmann::json o = nlohmann::json::object();
            for (std::size_t i = 0; i < t.columns.size(); ++i)
                if (!std::holds_alternative<std::monostate>(r[i])) o[t.columns[i]] = cell_json(r[i]);
            rows.push_back(o);
        }
        j["rows"] = rows;
        j["warnings"] = t.warnings;
        return j.dump(2) + "\n";
    }
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(cell_text(r[i]));
        out += "\n";
    }
    for (const auto& [k, v] : t.metadata) out += "# " + k + ": " + cell_text(v) + "\n";
    for (const auto& w : t.warnings) out += "# warning: " + w + "\n";
    return out;
}

const char* command_name(Command c) {
    switch (c) {
        case Command::Check: return "check";
        case Command::Vs: return "vs";
        case Command::Price: return "price";
        case Command::Simulate: return "simulate";
    }
    return "?";
}

mc::SimConfig sim_config(const RunConfig& rc, double horizon) {
    mc::SimConfig s;
    s.n_paths = rc.paths;
    s.n_steps = std::max(1, static_cast<int>(std::lround(horizon * rc.steps_per_year)));
    s.horizon = horizon;
    s.seed = rc.seed;
    s.antithetic = rc.antithetic;
    return s;
}

void add_model_metadata(Table& t, const RunConfig& rc) {
    const auto& m = rc.model;
    t.metadata["alpha"] = m.alpha;
    t.metadata["a"] = m.a;
    t.metadata["b"] = m.b;
    t.metadata["sigma"] = m.sigma;
    t.metadata["rho"] = m.rho;
    t.metadata["v0"] = m.v0;
    t.metadata["f0"] = m.f0;
}

}  // namespace

void apply_key(RunConfig& rc, const std::string& key, const std::string& value) {
    auto& m = rc.model;
    if (key == "alpha") m.alpha = parse_double(key, value);
    else if (key == "a") m.a = parse_double(key, value);
    else if (key == "b") m.b = parse_double(key, value);
    else if (key == "sigma") m.sigma = parse_double(key, value);
    else if (key == "rho") m.rho = parse_double(key, value);
    else if (key == "v0") m.v0 = parse_double(key, value);
    else if (key == "V0") {
        const double V = parse_double(key, value);
        if (!(V > 0.0)) throw ConfigError("field 'V0': must be positive");
        m.v0 = 0.5 * std::log(V);
    }
    else if (key == "f0") m.f0 = parse_double(key, value);
    else if (key == "maturity" || key == "maturities") rc.maturities = parse_list(key, value);
    else if (key == "strikes") rc.strikes = parse_list(key, value);
    else if (key == "rate") rc.rate = parse_double(key, value);
    else if (key == "paths") rc.paths = parse_int(key, value);
    else if (key == "steps_per_year") rc.steps_per_year = static_cast<int>(parse_int(key, value));
    else if (key == "seed") rc.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "antithetic") rc.antithetic = parse_bool(key, value);
    else if (key == "with_mc") rc.with_mc = parse_bool(key, value);
    else if (key == "talbot_nodes") rc.talbot.node_count = static_cast<int>(parse_int(key, value));
    else if (key == "talbot_shift") rc.talbot.contour_shift = parse_double(key, value);
    else if (key == "mellin_nodes") rc.mellin.node_count = static_cast<int>(parse_int(key, value));
    else if (key == "mellin_abscissa") rc.mellin.line_abscissa = parse_double(key, value);
    else if (key == "mellin_height") rc.mellin.truncation_height = parse_double(key, value);
    else if (key == "format") {
        const std::string v = trim(value);
        if (v == "csv") rc.format = Format::Csv;
        else if (v == "json") rc.format = Format::Json;
        else throw ConfigError("field 'format': expected csv or json, got '" + v + "'");
    }
    else throw ConfigError("unknown field '" + key + "'");
}

void apply_config_text(RunConfig& rc, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int n = 0;
    while (std::getline(ss, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        try {
            apply_key(rc, key, line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(n) + ": " + e.what());
        }
    }
}

void validate(const RunConfig& rc) {
    try {
        if (rc.command == Command::Simulate)
            rc.model.validate_paths();
        else
            rc.model.validate();
        rc.talbot.validate();
        rc.mellin.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    for (double t : rc.maturities)
        if (!(t > 0.0)) throw ConfigError("maturities must be positive");
    for (double k : rc.strikes)
        if (!(k > 0.0)) throw ConfigError("strikes must be positive");
    if (rc.paths < 2) throw ConfigError("paths must be >= 2");
    if (rc.antithetic && rc.paths % 2 != 0) throw ConfigError("antithetic runs need an even path count");
    if (rc.steps_per_year < 1) throw ConfigError("steps_per_year must be >= 1");
    if (rc.command == Command::Price) {
        if (rc.model.alpha != 1.0)
            throw ConfigError("price: call pricing is available for alpha = 1 only (Laplace-Mellin route)");
        const auto v = process::martingale_classify(rc.model);
        if (!v.is_martingale) throw ConfigError("price: forward is not a martingale (" + v.explanation + ")");
        if (rc.maturities.size() != 1) throw ConfigError("price: exactly one maturity expected");
    }
    if (rc.command == Command::Simulate && rc.maturities.size() != 1)
        throw ConfigError("simulate: exactly one maturity (horizon) expected");
}

std::string run_check(const RunConfig& rc) {
    const auto& m = rc.model;
    Table t;
    t.command = "check";
    t.columns = {"field", "value"};
    const auto v = process::martingale_classify(m);
    const std::string verdict =
        v.is_martingale ? "yes (" + v.explanation + ")" : "NO (" + v.explanation + ")";
    t.rows.push_back({std::string("martingale"), verdict});
    t.rows.push_back({std::string("rule"), std::string(to_string(v.rule))});
    const auto strip = process::mellin_strip(m);
    t.rows.push_back({std::string("lambda_minus"), strip.lambda_minus});
    t.rows.push_back({std::string("lambda_plus"), strip.lambda_plus});
    const auto sh = process::to_shiryaev(m);
    t.rows.push_back({std::string("lambda_star"), process::lambda_star(m.alpha, sh.nu)});
    if (m.a > 0.0) t.rows.push_back({std::string("long_term_limit"), process::long_term_limit(m)});
    add_model_metadata(t, rc);
    return render(t, rc.format);
}

std::string run_vs(const RunConfig& rc) {
    const auto& m = rc.model;
    Table t;
    t.command = "vs";
    t.columns = {"t", "vs_analytic", "vs_short_term"};
    const bool alpha2 = m.alpha == 2.0;
    if (alpha2) t.columns.push_back("vs_bound");
    if (rc.with_mc) {
        t.columns.push_back("vs_mc");
        t.columns.push_back("mc_se");
        t.columns.push_back("mc_check");
    }
    for (double T : rc.maturities) {
        std::vector<Cell> row;
        row.push_back(T);
        Cell analytic;
        try {
            if (m.alpha == 1.0) {
                analytic = morse::variance_swap_alpha1(m, T, rc.talbot);
            } else {
                const auto r = vswap::variance_swap_detailed(m, T);
                analytic = r.value;
                if (r.continued)
                    t.warnings.push_back("t=" + num(T) + ": Bromwich line at " + num(r.abscissa) +
                                         " lies left of lambda* + 1 (continued resolvent)");
            }
        } catch (const ContourError& e) {
            t.warnings.push_back("t=" + num(T) + ": " + e.what());
        }
        row.push_back(analytic);
        row.push_back(process::short_term_vs(m, T));
        if (alpha2) row.push_back(process::vs_upper_bound_alpha2(m, T));
        if (rc.with_mc) {
            const auto s = mc::simulate(m, sim_config(rc, T));
            row.push_back(s.vs_t.mean);
            row.push_back(s.vs_t.se);
            if (std::holds_alternative<double>(analytic))
                row.push_back(verdict(std::abs(std::get<double>(analytic) - s.vs_t.mean) < 3.0 * s.vs_t.se));
            else
                row.push_back(std::monostate{});
        }
        t.rows.push_back(row);
    }
    add_model_metadata(t, rc);
    t.metadata["route"] = std::string(m.alpha == 1.0 ? "morse-talbot" : "resolvent-bromwich");
    if (rc.with_mc) {
        t.metadata["seed"] = static_cast<double>(rc.seed);
        t.metadata["paths"] = static_cast<double>(rc.paths);
    }
    return render(t, rc.format);
}

std::string run_price(const RunConfig& rc) {
    const auto& m = rc.model;
    const double T = rc.maturities.front();
    pricing::PricingConfig pc;
    pc.talbot = rc.talbot;
    pc.mellin = rc.mellin;
    const auto sm = pricing::smile(m, rc.strikes, T, rc.rate, pc);
    Table t;
    t.command = "price";
    t.columns = {"k", "price", "implied_vol"};
    std::optional<mc::SimStats> sim;
    if (rc.with_mc) {
        t.columns.push_back("mc_price");
        t.columns.push_back("mc_se");
        t.columns.push_back("mc_check");
        sim = mc::simulate(m, sim_config(rc, T), rc.strikes, rc.rate);
    }
    for (const auto& p : sm) {
        std::vector<Cell> row{p.strike, p.price};
        row.push_back(std::isnan(p.implied_vol) ? Cell{} : Cell{p.implied_vol});
        if (sim) {
            const auto e = sim->call.at(p.strike);
            row.push_back(e.mean);
            row.push_back(e.se);
            row.push_back(verdict(std::abs(p.price - e.mean) < 3.0 * e.se));
        }
        t.rows.push_back(row);
    }
    add_model_metadata(t, rc);
    const auto line = pricing::resolve_line(m, T, rc.mellin);
    t.metadata["t"] = T;
    t.metadata["rate"] = rc.rate;
    t.metadata["mellin_abscissa"] = line.lambda0;
    t.metadata["mellin_height"] = line.height;
    t.metadata["mellin_nodes"] = static_cast<double>(line.nodes);
    t.metadata["talbot_nodes"] = static_cast<double>(rc.talbot.node_count);
    if (sim) {
        t.metadata["seed"] = static_cast<double>(rc.seed);
        t.metadata["paths"] = static_cast<double>(rc.paths);
    }
    return render(t, rc.format);
}

std::string run_simulate(const RunConfig& rc) {
    const double T = rc.maturities.front();
    const auto cfg = sim_config(rc, T);
    const auto s = mc::simulate(rc.model, cfg, rc.strikes, rc.rate);
    Table t;
    t.command = "simulate";
    t.columns = {"quantity", "strike", "mean", "se"};
    t.rows.push_back({std::string("ev_t"), Cell{}, s.ev_t.mean, s.ev_t.se});
    t.rows.push_back({std::string("vs_t"), Cell{}, s.vs_t.mean, s.vs_t.se});
    t.rows.push_back({std::string("ef_t"), Cell{}, s.ef_t.mean, s.ef_t.se});
    for (const auto& [k, e] : s.call) t.rows.push_back({std::string("call"), k, e.mean, e.se});
    add_model_metadata(t, rc);
    t.metadata["seed"] = static_cast<double>(s.seed);
    t.metadata["paths"] = static_cast<double>(cfg.n_paths);
    t.metadata["steps"] = static_cast<double>(cfg.n_steps);
    t.metadata["horizon"] = T;
    t.metadata["antithetic"] = cfg.antithetic;
    t.metadata["overflow_paths"] = static_cast<double>(s.overflow_paths);
    if (s.overflow_paths > 0) t.warnings.push_back("paths with log f above 340 were excluded");
    return render(t, rc.format);
}

std::string run(const RunConfig& rc) {
    switch (rc.command) {
        case Command::Check: return run_check(rc);
        case Command::Vs: return run_vs(rc);
        case Command::Price: return run_price(rc);
        case Command::Simulate: return run_simulate(rc);
    }
    return {};
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"alpha-hypergeometric stochastic volatility engine"};
    std::string command, config_path, out_path, format, strikes, maturity;
    std::optional<std::uint64_t> seed;
    std::optional<double> rate;
    std::optional<std::int64_t> paths;
    bool with_mc = false;
    app.add_option("command", command, "check | vs | price | simulate")->required();
    app.add_option("--config", config_path, "key = value parameter file")->required();
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "csv | json");
    app.add_option("--seed", seed, "Monte Carlo seed");
    app.add_flag("--with-mc", with_mc, "add Monte Carlo columns");
    app.add_option("--strikes", strikes, "comma-separated strikes");
    app.add_option("--maturity", maturity, "maturity in years (comma list for vs)");
    app.add_option("--rate", rate, "continuously compounded rate");
    app.add_option("--paths", paths, "Monte Carlo path count");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return BadConfig;
    }

    RunConfig rc;
    try {
        if (command == "check") rc.command = Command::Check;
        else if (command == "vs") rc.command = Command::Vs;
        else if (command == "price") rc.command = Command::Price;
        else if (command == "simulate") rc.command = Command::Simulate;
        else throw ConfigError("unknown command '" + command + "'");
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            apply_config_text(rc, buf.str());
        } catch (const ConfigError& e) {
            throw ConfigError(config_path + ": " + e.what());
        }
        if (!format.empty()) apply_key(rc, "format", format);
        if (!strikes.empty()) apply_key(rc, "strikes", strikes);
        if (!maturity.empty()) apply_key(rc, "maturity", maturity);
        if (seed) rc.seed = *seed;
        if (rate) rc.rate = *rate;
        if (paths) rc.paths = *paths;
        if (with_mc) rc.with_mc = true;
        if (!out_path.empty()) rc.out = out_path;
        validate(rc);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return BadConfig;
    }

    std::string text;
    try {
        text = run(rc);
    } catch (const NodeError& e) {
        err << "numerical failure at inversion " << e.what() << "\n";
        return NumericalFailure;
    } catch (const std::exception& e) {
        err << "numerical failure (" << command_name(rc.command) << "): " << e.what() << "\n";
        return NumericalFailure;
    }
    if (rc.out) {
        std::ofstream f(*rc.out, std::ios::binary);
        if (!f) {
            err << "config error: cannot write '" << *rc.out << "'\n";
            return BadConfig;
        }
        f << text;
    } else {
        out << text;
    }
    return Ok;
}

}  // namespace alphahyper::cli
