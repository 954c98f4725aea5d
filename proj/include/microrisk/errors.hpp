#pragma once

#include <stdexcept>
#include <string>

namespace microrisk {

// Base class for all engine failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem-level failures: missing, unreadable, or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input content: bad CSV structure, bad config
// JSON, value/config drift detected after validation.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace microrisk
