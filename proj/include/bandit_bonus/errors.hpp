/**
 * @file errors.hpp
 * @brief Error taxonomy shared by the library and the CLI front end.
 *
 * Three failure families are kept distinct so the command-line driver can map
 * them to distinct exit codes:
 *   - ConfigError:    the run configuration could not be read or understood.
 *   - InvariantError: the configuration parsed but violates a model assumption
 *                     (the message names the violated assumption).
 *   - SolverError:    a numerical routine failed (no bracket, non-termination,
 *                     drift below a pasting branch, ...).
 */
#pragma once

#include <stdexcept>
#include <string>

namespace bb {

/// Configuration could not be parsed (missing file, malformed text, unknown key).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A model assumption does not hold; the message names the violated assumption.
class InvariantError : public std::runtime_error {
  public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical solver failed to produce a valid result.
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bb
