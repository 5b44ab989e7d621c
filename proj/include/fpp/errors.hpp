#pragma once

#include <stdexcept>
#include <string>

namespace fpp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterRange : Error {
    using Error::Error;
};
struct InvalidLaw : Error {
    using Error::Error;
};
struct MisalignedWindows : Error {
    using Error::Error;
};
struct NoAnchor : Error {
    using Error::Error;
};
struct InsufficientWindow : Error {
    using Error::Error;
};
struct CapExceeded : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};

}  // namespace fpp
