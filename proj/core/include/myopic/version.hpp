#pragma once

namespace myopic {

const char* version();

}  // namespace myopic
