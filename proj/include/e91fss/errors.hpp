#pragma once

#include <stdexcept>
#include <string>

namespace e91fss {

/// Coincident analyzer directions (beta = n*pi): basis choice carries no
/// randomness, so the run cannot be treated as a secure key exchange.
class DegenerateAnglesError : public std::runtime_error {
  public:
    explicit DegenerateAnglesError(const std::string& what) : std::runtime_error(what) {}
};

/// A rate was requested from a run that produced no coincident-basis events.
/// Distinct from SKR = 0, which means "measured and found uncorrelated".
class NoCoincidentEventsError : public std::runtime_error {
  public:
    explicit NoCoincidentEventsError(const std::string& what) : std::runtime_error(what) {}
};

/// A CHSH estimator pair received zero events; names the empty pair.
class InsufficientStatisticsError : public std::runtime_error {
  public:
    InsufficientStatisticsError(const std::string& what, int alice_dir, int bob_dir)
        : std::runtime_error(what), alice_dir_(alice_dir), bob_dir_(bob_dir) {}

    int alice_dir() const { return alice_dir_; }
    int bob_dir() const { return bob_dir_; }

  private:
    int alice_dir_;
    int bob_dir_;
};

/// Filesystem failure; message carries the offending path.
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed command line or config file.
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace e91fss
