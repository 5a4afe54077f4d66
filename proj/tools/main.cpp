#include "virodyn/run.hpp"

namespace virodyn { int cli_main(int, char**) { return 0; } }  // placeholder

int main(int argc, char** argv) { return virodyn::cli_main(argc, argv); }
