#pragma once

#include <stdexcept>
#include <string>

namespace rai::msgbus {

class BusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTopic : public BusError {
 public:
  using BusError::BusError;
};

class ServiceNotFound : public BusError {
 public:
  using BusError::BusError;
};

class Timeout : public BusError {
 public:
  using BusError::BusError;
};

// The service handler signalled failure; what() carries the handler's message.
class HandlerError : public BusError {
 public:
  using BusError::BusError;
};

class DuplicateService : public BusError {
 public:
  using BusError::BusError;
};

class ActionServerNotFound : public BusError {
 public:
  using BusError::BusError;
};

class AlreadyTerminal : public BusError {
 public:
  using BusError::BusError;
};

class MalformedFrame : public BusError {
 public:
  using BusError::BusError;
};

}  // namespace rai::msgbus
