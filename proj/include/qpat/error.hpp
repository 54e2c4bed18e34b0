#pragma once

#include <stdexcept>
#include <string>

namespace qpat
{
//! Base of every library error.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Geometric input outside the domain of an operation (e.g. coincident foci).
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error
{
  public:
    using Error::Error;
};

//! A numerical guard tripped (tolerance, denominator, coverage).
class NumericalError : public Error
{
  public:
    using Error::Error;
};

//! Invalid run configuration.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

//! File system or serialization failure.
class IoError : public Error
{
  public:
    using Error::Error;
};

//! Run `fn`, prefixing any library error message with `stage` while
//! preserving the error type.
template<class F>
decltype(auto) with_stage(std::string const& stage, F&& fn)
{
    try
    {
        return fn();
    }
    catch (DomainError const& e)
    {
        throw DomainError(stage + ": " + e.what());
    }
    catch (PreconditionError const& e)
    {
        throw PreconditionError(stage + ": " + e.what());
    }
    catch (NumericalError const& e)
    {
        throw NumericalError(stage + ": " + e.what());
    }
    catch (ConfigError const& e)
    {
        throw ConfigError(stage + ": " + e.what());
    }
    catch (IoError const& e)
    {
        throw IoError(stage + ": " + e.what());
    }
}

}  // namespace qpat
