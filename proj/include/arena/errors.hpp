#pragma once

#include <stdexcept>
#include <string>

namespace arena {

/// Base class for every error raised by the arena library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ARENA_DEFINE_ERROR(Name)              \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

// combat engine
ARENA_DEFINE_ERROR(IllegalAction);
ARENA_DEFINE_ERROR(RoundOver);
ARENA_DEFINE_ERROR(EmptyPattern);

// decision models
ARENA_DEFINE_ERROR(UnknownState);
ARENA_DEFINE_ERROR(MalformedTree);
ARENA_DEFINE_ERROR(TerminalState);
ARENA_DEFINE_ERROR(NoLegalActions);

// harness
ARENA_DEFINE_ERROR(ConfigError);
ARENA_DEFINE_ERROR(AgentInitError);
ARENA_DEFINE_ERROR(FormatError);
ARENA_DEFINE_ERROR(VersionMismatch);
ARENA_DEFINE_ERROR(EmptyLog);
ARENA_DEFINE_ERROR(PortInUse);
ARENA_DEFINE_ERROR(ProtocolViolation);

#undef ARENA_DEFINE_ERROR

}  // namespace arena
