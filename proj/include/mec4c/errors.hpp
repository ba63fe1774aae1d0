#ifndef MEC4C_ERRORS_HPP_
#define MEC4C_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mec4c
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or configuration value.
class ParameterError : public Error
{
public:
  using Error::Error;
};

// A station is not covered by any collaboration space.
class CoverageError : public Error
{
public:
  using Error::Error;
};

class ParseError : public Error
{
public:
  ParseError(std::size_t line, const std::string & what)
  : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept {return line_;}

private:
  std::size_t line_;
};

// A link or radio rate is zero while flow is routed over it.
class InfeasibleRateError : public Error
{
public:
  using Error::Error;
};

// No decision satisfies the hard constraints for some task or instance.
class InfeasibleError : public Error
{
public:
  InfeasibleError(std::size_t task, const std::string & what)
  : Error(what), task_(task) {}

  std::size_t task() const noexcept {return task_;}

private:
  std::size_t task_;
};

class CacheItemTooLarge : public Error
{
public:
  using Error::Error;
};

class SizeError : public Error
{
public:
  using Error::Error;
};

class SolverError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

}  // namespace mec4c

#endif  // MEC4C_ERRORS_HPP_
