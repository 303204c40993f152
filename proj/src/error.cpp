#include "icecav/error.hpp"

// Out-of-line anchor so the error vtables live in one TU.
namespace icecav {}
