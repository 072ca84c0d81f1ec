#include "gplmk/errors.hpp"

#include <utility>

namespace gplmk {

Error::Error(ErrorCategory category, std::string name, const std::string& what)
    : std::runtime_error(what), category_(category), name_(std::move(name)), message_(what) {}

void Error::add_context(const std::string& stage) { message_ = stage + ": " + message_; }

}  // namespace gplmk
