#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace zana {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input data; carries a 1-based line number when one is known.
struct ParseError : Error {
    explicit ParseError(const std::string& what, std::size_t line_no = 0)
        : Error(line_no ? "line " + std::to_string(line_no) + ": " + what : what),
          line(line_no) {}
    std::size_t line = 0;
};

// A chain-model or store invariant was violated (double spend, duplicate
// txid, negative fee where none is allowed, ...).
struct IntegrityError : Error {
    using Error::Error;
};

// An operation was called outside its contract (e.g. unresolved inputs).
struct PreconditionError : Error {
    using Error::Error;
};

struct NotFoundError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Retriable node failure; resume_height is the first height not yet
// committed, so a re-run can continue where this one stopped.
struct RpcError : Error {
    RpcError(const std::string& what, std::optional<std::uint64_t> resume = std::nullopt)
        : Error(what), resume_height(resume) {}
    std::optional<std::uint64_t> resume_height;
};

// Stored parent hash does not match the node's chain; reorg handling is out
// of scope, so ingestion aborts.
struct ReorgError : Error {
    using Error::Error;
};

} // namespace zana
