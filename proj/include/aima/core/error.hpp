#pragma once

#include <stdexcept>
#include <string>

namespace aima {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent user-provided data (schemas, records, manifests).
struct ValidationError : Error {
    using Error::Error;
};

/// Bad configuration values or unknown override keys.
struct ConfigError : Error {
    using Error::Error;
};

/// File-system and parse failures.
struct IoError : Error {
    using Error::Error;
};

/// Checkpoint corruption or version mismatch.
struct IntegrityError : Error {
    using Error::Error;
};

}  // namespace aima
