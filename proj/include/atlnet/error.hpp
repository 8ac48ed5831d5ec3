#pragma once

#include <stdexcept>
#include <string>

namespace atlnet
{
  // Malformed or unknown input: bad syntax, unknown identifiers, wrong arity.
  class input_error : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  // An operation was called outside its domain (e.g. firing a disabled
  // transition).
  class precondition_error : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  // A configured bound was exceeded. The message reports the bound.
  class resource_error : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };
} // namespace atlnet
