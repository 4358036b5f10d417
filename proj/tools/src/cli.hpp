#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "alphahyper/inversion.hpp"
#include "alphahyper/pricing.hpp"
#include "alphahyper/process.hpp"

namespace alphahyper::cli {

enum class Command { Check, Vs, Price, Simulate };
enum class Format { Csv, Json };

// Bad input: maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::Check;
    ModelParams model{};
    std::vector<double> maturities{1.0};
    std::vector<double> strikes{1.0};
    double rate = 0.0;
    std::int64_t paths = 100000;
    int steps_per_year = 250;
    std::uint64_t seed = 1;
    bool antithetic = false;
    bool with_mc = false;
    inversion::TalbotConfig talbot{};
    pricing::MellinLineConfig mellin{};
    Format format = Format::Csv;
    std::optional<std::string> out;
};

enum ExitCode { Ok = 0, BadConfig = 2, NumericalFailure = 3 };

// key = value lines, '#' comments. Throws ConfigError naming the line and key.
void apply_config_text(RunConfig& rc, const std::string& text);
void apply_key(RunConfig& rc, const std::string& key, const std::string& value);

// Rejects parameter combinations that the command cannot handle.
void validate(const RunConfig& rc);

std::string run_check(const RunConfig& rc);
std::string run_vs(const RunConfig& rc);
std::string run_price(const RunConfig& rc);
std::string run_simulate(const RunConfig& rc);
std::string run(const RunConfig& rc);

// Full command-line entry: parses argv, runs, writes output. Returns the exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace alphahyper::cli
