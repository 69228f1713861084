#ifndef HOBJ_ERRORS_HPP
#define HOBJ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hobj
{

// Vector lengths disagree (objective vectors, masks, decision vectors).
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Decision vector outside the problem's box.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Generator or algorithm parameter outside its admissible range.
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation invoked in a state that does not allow it.
struct state_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Too few samples for a statistic.
struct insufficient_data_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Run or suite configuration that cannot be executed.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace hobj

#endif
