#pragma once

namespace virodyn {
int cli_main(int argc, char** argv);
}  // namespace virodyn
