#pragma once

#include <map>
#include <optional>
#include <string>

#include "impulse_games/model.hpp"

namespace impulse_games {

/// Flat key = value configuration file ('#' comments, blank lines ignored).
/// One file drives every CLI command; unknown keys are kept and readable.
class FlatConfig {
public:
    static FlatConfig parse_file(const std::string& path);
    static FlatConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    /// Throws std::runtime_error naming the key when absent or non-numeric.
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;

    const std::map<std::string, std::string>& raw() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Builds GameParams from the model keys (h, p, K_plus, K_minus, k_plus,
/// k_minus, c, r, sigma, alpha_slope, alpha_intercept). Missing required keys
/// raise with the key name; the result is validated.
GameParams params_from_config(const FlatConfig& cfg);

} // namespace impulse_games
