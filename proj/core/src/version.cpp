#include "myopic/version.hpp"

namespace myopic {

const char* version() { return MYOPIC_VERSION_STRING; }

}  // namespace myopic
