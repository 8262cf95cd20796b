#ifndef VRNAV_ERROR_HPP
#define VRNAV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace vrnav
{

// Library errors are exceptions; the CLI maps them onto exit codes.

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct InvalidActionError : Error
{
    using Error::Error;
};

struct ShapeError : Error
{
    using Error::Error;
};

struct GeometryError : Error
{
    using Error::Error;
};

/// A configuration or input value failed validation. `field` names the offending key when known.
struct ValidationError : Error
{
    ValidationError(std::string field_name, const std::string& what)
        : Error(field_name.empty() ? what : field_name + ": " + what), field(std::move(field_name))
    {}
    std::string field;
};

/// A file produced by an earlier pipeline stage is absent or unreadable.
struct MissingArtifactError : Error
{
    using Error::Error;
};

} // namespace vrnav

#endif // VRNAV_ERROR_HPP
