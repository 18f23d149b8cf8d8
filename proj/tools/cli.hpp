#pragma once

// Command-line front end. run_cli is the whole program minus process setup,
// so tests can drive it with captured streams.

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vecdraw/net.hpp"

namespace vecdraw::cli {

enum ExitCode { kOk = 0, kUsage = 1, kProvider = 2, kInternal = 3, kGeneration = 4 };

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Flat `key = value` settings. Later sources override earlier ones:
/// file, then environment, then flags.
class Settings {
public:
    /// Throws Error(InvalidArgument) on unknown keys or malformed lines.
    void load_file(const std::string& path);
    void load_env(const EnvLookup& env);
    void set(const std::string& key, const std::string& value);
    std::optional<std::string> get(const std::string& key) const;

    bool mock() const;
    std::uint64_t seed() const;
    /// Endpoint settings for one port: "generator", "guidance" or "embedder".
    /// Raises InvalidArgument naming the port when no endpoint is configured.
    BackendConfig backend(const std::string& port) const;

private:
    std::map<std::string, std::string> values_;
};

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env);

}  // namespace vecdraw::cli
